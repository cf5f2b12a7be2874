#include "lentparticle/bottom_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lentparticle/errors.hpp"

namespace lp {

ScalarTestFunction::ScalarTestFunction(std::string name, Fn value, Fn deriv1, std::optional<Fn> deriv2,
                                       bool compact_interior_support)
    : name_(std::move(name)),
      value_(std::move(value)),
      deriv1_(std::move(deriv1)),
      deriv2_(std::move(deriv2)),
      compact_interior_support_(compact_interior_support) {}

double ScalarTestFunction::deriv2(double x) const {
    if (!deriv2_) {
        throw CapabilityError("test function '" + name_ + "' has no second derivative");
    }
    return (*deriv2_)(x);
}

namespace fn {

namespace {

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
template <class S>
S smooth_step(const S& t) {
    using std::exp;
    if (value_of(t) <= 0.0) {
        return t * 0.0;
    }
    if (value_of(t) >= 1.0) {
        return t * 0.0 + 1.0;
    }
    const S e1 = exp(-1.0 / t);
    const S e2 = exp(-1.0 / (1.0 - t));
    return e1 / (e1 + e2);
}

}  // namespace

ScalarTestFunction constant(double c) {
    std::ostringstream name;
    name << "constant(" << c << ")";
    return ScalarTestFunction::from_generic(name.str(), [c](const auto& y) { return y * 0.0 + c; });
}

ScalarTestFunction identity() {
    return ScalarTestFunction::from_generic("identity", [](const auto& y) { return y; });
}

ScalarTestFunction affine(double intercept, double slope) {
    return ScalarTestFunction::from_generic(
        "affine", [intercept, slope](const auto& y) { return y * slope + intercept; });
}

ScalarTestFunction polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) {
        coeffs.push_back(0.0);
    }
    return ScalarTestFunction::from_generic("polynomial", [coeffs](const auto& y) {
        auto acc = y * 0.0 + coeffs.back();
        for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) {
            acc = acc * y + *it;
        }
        return acc;
    });
}

ScalarTestFunction sigmoid(double scale) {
    return ScalarTestFunction::from_generic("sigmoid", [scale](const auto& y) {
        using std::exp;
        return 1.0 / (1.0 + exp(y * -scale));
    });
}

ScalarTestFunction shifted_sigmoid() {
    return ScalarTestFunction::from_generic("shifted-sigmoid", [](const auto& y) {
        using std::exp;
        return 0.5 + 1.0 / (1.0 + exp(-y));
    });
}

ScalarTestFunction bump(double center, double half_width) {
    return ScalarTestFunction::from_generic(
        "bump",
        [center, half_width](const auto& y) {
            using std::exp;
            const auto u = (y - center) / half_width;
            if (std::abs(value_of(u)) >= 1.0) {
                return u * 0.0;
            }
            return exp(1.0 - 1.0 / (1.0 - u * u));
        },
        true);
}

ScalarTestFunction cutoff_quadratic(double center, double support_lo, double plateau_lo,
                                    double plateau_hi, double support_hi) {
    return ScalarTestFunction::from_generic(
        "cutoff-quadratic",
        [=](const auto& y) {
            const auto d = y - center;
            const auto left = smooth_step((y - support_lo) / (plateau_lo - support_lo));
            const auto right = smooth_step((support_hi - y) / (support_hi - plateau_hi));
            return d * d * left * right;
        },
        true);
}

ScalarTestFunction builtin(const std::string& name) {
    if (name == "zero") return constant(0.0);
    if (name == "one") return constant(1.0);
    if (name == "identity") return identity();
    if (name == "affine") return affine(0.3, 1.5);
    if (name == "square") return polynomial({0.0, 0.0, 1.0});
    if (name == "cubic") return polynomial({0.1, -0.5, 0.25, 1.0});
    if (name == "sigmoid") return sigmoid(3.0);
    if (name == "shifted-sigmoid") return shifted_sigmoid();
    if (name == "bump") return bump(0.0, 1.0);
    throw std::invalid_argument("unknown test function '" + name + "'");
}

std::vector<std::string> builtin_names() {
    return {"zero", "one", "identity", "affine", "square", "cubic", "sigmoid", "shifted-sigmoid", "bump"};
}

}  // namespace fn

JumpMeasureSpec::JumpMeasureSpec(std::string name, std::vector<Interval> support, Fn density,
                                 Fn log_density_deriv, bool symmetric, std::size_t table_size)
    : name_(std::move(name)),
      support_(std::move(support)),
      density_(std::move(density)),
      log_density_deriv_(std::move(log_density_deriv)),
      symmetric_(symmetric) {
    if (support_.empty() || support_.size() > 2) {
        throw std::invalid_argument("jump support must be one or two intervals");
    }
    std::sort(support_.begin(), support_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const Interval& iv = support_[i];
        if (!(iv.lo < iv.hi)) {
            throw std::invalid_argument("empty support interval");
        }
        if (iv.contains(0.0)) {
            throw std::invalid_argument("jump support must exclude a neighbourhood of 0");
        }
        if (i > 0 && !(support_[i - 1].hi < iv.lo)) {
            throw std::invalid_argument("support intervals must be disjoint");
        }
    }
    if (symmetric_) {
        const bool mirrored = support_.size() == 2 && support_[0].lo == -support_[1].hi &&
                              support_[0].hi == -support_[1].lo;
        if (!mirrored) {
            throw std::invalid_argument("a symmetric measure needs a support symmetric about 0");
        }
    }
    if (table_size < 2 * support_.size()) {
        throw std::invalid_argument("inverse-CDF table too small");
    }

    total_mass_ = integrate([](double) { return 1.0; });
    m1_ = symmetric_ ? 0.0 : integrate([](double x) { return x; });
    m2_ = integrate([](double x) { return x * x; });
    if (!(total_mass_ > 0.0) || !std::isfinite(total_mass_) || !std::isfinite(m2_)) {
        throw std::invalid_argument("jump measure must have finite positive mass and finite m2");
    }

    // Nodes are spread over the intervals in proportion to their length.
    double total_length = 0.0;
    for (const Interval& iv : support_) total_length += iv.length();
    std::vector<std::size_t> counts;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        std::size_t c = (i + 1 == support_.size())
                            ? table_size - assigned
                            : static_cast<std::size_t>(std::round(
                                  static_cast<double>(table_size) * support_[i].length() / total_length));
        c = std::max<std::size_t>(c, 2);
        counts.push_back(c);
        assigned += c;
    }

    const GaussLegendre& rule = gauss_legendre(16);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const Interval& iv = support_[i];
        const std::size_t c = counts[i];
        double prev = iv.lo;
        for (std::size_t k = 0; k < c; ++k) {
            const double x = (k + 1 == c) ? iv.hi
                                          : iv.lo + iv.length() * static_cast<double>(k) /
                                                        static_cast<double>(c - 1);
            if (k > 0) {
                cumulative += rule.integrate(density_, prev, x);
            }
            table_x_.push_back(x);
            table_cdf_.push_back(cumulative);
            prev = x;
        }
    }
    for (double& v : table_cdf_) v /= cumulative;
    table_cdf_.back() = 1.0;
}

bool JumpMeasureSpec::contains(double x) const {
    return std::any_of(support_.begin(), support_.end(), [x](const Interval& iv) { return iv.contains(x); });
}

double JumpMeasureSpec::log_density_derivative(double x) const {
    if (!contains(x) || density_(x) <= 0.0) {
        throw DomainError("log-density derivative requested where the density vanishes");
    }
    return log_density_deriv_(x);
}

double JumpMeasureSpec::quantile(double u) const {
    if (u <= 0.0) return table_x_.front();
    if (u >= 1.0) return table_x_.back();
    // cdf[k] <= u < cdf[k+1]; zero-width cells across a support gap are never selected.
    const auto it = std::upper_bound(table_cdf_.begin(), table_cdf_.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - table_cdf_.begin()) - 1;
    const double c0 = table_cdf_[k];
    const double c1 = table_cdf_[k + 1];
    const double x0 = table_x_[k];
    const double x1 = table_x_[k + 1];
    const double x = x0 + (u - c0) / (c1 - c0) * (x1 - x0);
    return std::clamp(x, x0, x1);
}

JumpMeasureSpec uniform_measure(double a, double b, double intensity) {
    if (!(0.0 < a && a < b) || !(intensity > 0.0)) {
        throw std::invalid_argument("uniform measure needs 0 < a < b and positive intensity");
    }
    const double p = intensity / (b - a);
    return JumpMeasureSpec(
        "uniform", {{a, b}}, [p](double) { return p; }, [](double) { return 0.0; });
}

JumpMeasureSpec symmetric_stable_measure(double alpha, double a, double b, double intensity) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::invalid_argument("stable index alpha must lie in (0, 2)");
    }
    if (!(0.0 < a && a < b) || !(intensity > 0.0)) {
        throw std::invalid_argument("stable measure needs 0 < a < b and positive intensity");
    }
    // Mass of |x|^(-1-alpha) over both intervals is 2 (a^-alpha - b^-alpha) / alpha.
    const double c = intensity * alpha / (2.0 * (std::pow(a, -alpha) - std::pow(b, -alpha)));
    return JumpMeasureSpec(
        "symmetric-stable", {{-b, -a}, {a, b}},
        [c, alpha](double x) { return c * std::pow(std::abs(x), -1.0 - alpha); },
        [alpha](double x) { return -(1.0 + alpha) / x; }, true);
}

double gamma_bottom(const ScalarTestFunction& f, const ScalarTestFunction& g, double x) {
    return x * x * (f.deriv1(x) * g.deriv1(x));
}

double eta(double r) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw DomainError("eta: mark outside [0, 1]");
    }
    return std::sqrt(12.0) * (r - 0.5);
}

double flat(const ScalarTestFunction& f, double x, double r) {
    return x * f.deriv1(x) * eta(r);
}

double generator_a(const ScalarTestFunction& h, double x, const JumpMeasureSpec& spec) {
    if (!h.has_deriv2()) {
        throw CapabilityError("generator_a: test function '" + h.name() + "' has no second derivative");
    }
    if (spec.density(x) <= 0.0) {
        throw DomainError("generator_a: density vanishes at x");
    }
    const double drift = 2.0 * x + x * x * spec.log_density_derivative(x);
    return 0.5 * (x * x * h.deriv2(x) + drift * h.deriv1(x));
}

double sample_jump(const JumpMeasureSpec& spec, double u) { return spec.quantile(u); }

}  // namespace lp
