#pragma once

#include <cstddef>
#include <vector>

namespace lp {

// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
class GaussLegendre {
public:
    explicit GaussLegendre(std::size_t order);

    std::size_t order() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    // Integral of fn over [lo, hi].
    template <class Fn>
    auto integrate(Fn&& fn, double lo, double hi) const {
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        using R = decltype(fn(mid));
        R sum{};
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            sum += weights_[k] * fn(mid + half * nodes_[k]);
        }
        return sum * half;
    }

    // Composite rule: `panels` equal sub-intervals of [lo, hi].
    template <class Fn>
    auto integrate_composite(Fn&& fn, double lo, double hi, std::size_t panels) const {
        const double width = (hi - lo) / static_cast<double>(panels);
        using R = decltype(fn(lo));
        R sum{};
        for (std::size_t p = 0; p < panels; ++p) {
            const double a = lo + width * static_cast<double>(p);
            const double b = (p + 1 == panels) ? hi : a + width;
            sum += integrate(fn, a, b);
        }
        return sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

// Shared, lazily built rules of common orders.
const GaussLegendre& gauss_legendre(std::size_t order);

}  // namespace lp
