#pragma once

// The bottom structure on the jump sizes: a finite truncated Levy measure
// sigma on a subset of R\{0}, the carre du champ gamma[f](x) = x^2 f'(x)^2,
// its gradient f^flat(x, r) = x f'(x) eta(r) with values in L^2([0,1]) and
// the generator a of the associated Dirichlet form.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lentparticle/dual.hpp"
#include "lentparticle/quadrature.hpp"

namespace lp {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    double length() const { return hi - lo; }
};

// A smooth real function of one variable together with its first derivative
// and, optionally, its second derivative.
class ScalarTestFunction {
public:
    using Fn = std::function<double(double)>;

    ScalarTestFunction(std::string name, Fn value, Fn deriv1, std::optional<Fn> deriv2 = std::nullopt,
                       bool compact_interior_support = false);

    // Builds all three derivatives from one generic callable by nested dual
    // evaluation. `fn` must accept double, Dual<double> and Dual<Dual<double>>.
    template <class Generic>
    static ScalarTestFunction from_generic(std::string name, Generic fn,
                                           bool compact_interior_support = false) {
        return ScalarTestFunction(
            std::move(name), [fn](double x) { return fn(x); },
            [fn](double x) { return fn(Dual<double>::variable(x)).deriv; },
            Fn([fn](double x) {
                const Dual<Dual<double>> arg(Dual<double>(x, 1.0), Dual<double>(1.0, 0.0));
                return fn(arg).deriv.deriv;
            }),
            compact_interior_support);
    }

    double operator()(double x) const { return value_(x); }
    Dual<double> operator()(const Dual<double>& x) const {
        return {value_(x.value), deriv1_(x.value) * x.deriv};
    }

    double deriv1(double x) const { return deriv1_(x); }
    double deriv2(double x) const;  // CapabilityError when absent
    bool has_deriv2() const { return deriv2_.has_value(); }

    const std::string& name() const { return name_; }
    // Whether the function vanishes outside a compact subset of the open
    // jump support (boundary terms drop out of integration by parts).
    bool compact_interior_support() const { return compact_interior_support_; }

private:
    std::string name_;
    Fn value_;
    Fn deriv1_;
    std::optional<Fn> deriv2_;
    bool compact_interior_support_;
};

namespace fn {

ScalarTestFunction constant(double c);
ScalarTestFunction identity();
ScalarTestFunction affine(double intercept, double slope);
ScalarTestFunction polynomial(std::vector<double> coeffs);  // coeffs[k] multiplies y^k
ScalarTestFunction sigmoid(double scale = 1.0);
// 0.5 + 1/(1+exp(-y)): bounded below by 0.5.
ScalarTestFunction shifted_sigmoid();
// exp(1 - 1/(1-u^2)) with u = (y - center)/half_width, zero for |u| >= 1.
ScalarTestFunction bump(double center = 0.0, double half_width = 1.0);
// (y - center)^2 multiplied by a smooth cutoff equal to 1 on [plateau_lo,
// plateau_hi] and vanishing outside (support_lo, support_hi).
ScalarTestFunction cutoff_quadratic(double center, double support_lo, double plateau_lo,
                                    double plateau_hi, double support_hi);

// Named built-ins: zero, one, identity, affine, square, cubic, sigmoid,
// shifted-sigmoid, bump. Throws std::invalid_argument for unknown names.
ScalarTestFunction builtin(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace fn

class JumpMeasureSpec {
public:
    using Fn = std::function<double(double)>;

    static constexpr std::size_t kDefaultTableSize = 4096;

    // `density` is p on the support (zero elsewhere); `log_density_deriv` is
    // p'/p on the support interior. A `symmetric` measure (p(-x) = p(x) on a
    // support symmetric about 0) has m1 set to exactly 0.
    JumpMeasureSpec(std::string name, std::vector<Interval> support, Fn density, Fn log_density_deriv,
                    bool symmetric = false, std::size_t table_size = kDefaultTableSize);

    const std::string& name() const { return name_; }
    const std::vector<Interval>& support() const { return support_; }
    bool symmetric() const { return symmetric_; }
    bool contains(double x) const;

    double density(double x) const { return contains(x) ? density_(x) : 0.0; }
    double log_density_derivative(double x) const;  // DomainError off the support

    double total_mass() const { return total_mass_; }
    double m1() const { return m1_; }
    double m2() const { return m2_; }

    // Integral of fn(x) p(x) dx over the support; composite 16-point
    // Gauss-Legendre with `panels` panels per interval.
    template <class F>
    auto integrate(F&& fn, std::size_t panels = 256) const {
        const GaussLegendre& rule = gauss_legendre(16);
        using R = decltype(fn(0.0) * 1.0);
        R sum{};
        for (const Interval& iv : support_) {
            sum += rule.integrate_composite([&](double x) { return fn(x) * density_(x); }, iv.lo,
                                            iv.hi, panels);
        }
        return sum;
    }

    // Quantile of the normalized jump law sigma/lambda by linear
    // interpolation in the inverse-CDF table.
    double quantile(double u) const;

    const std::vector<double>& table_nodes() const { return table_x_; }
    const std::vector<double>& table_cdf() const { return table_cdf_; }

private:
    std::string name_;
    std::vector<Interval> support_;
    Fn density_;
    Fn log_density_deriv_;
    bool symmetric_;
    double total_mass_ = 0.0;
    double m1_ = 0.0;
    double m2_ = 0.0;
    std::vector<double> table_x_;
    std::vector<double> table_cdf_;
};

// Constant density on [a, b] with total mass `intensity`.
JumpMeasureSpec uniform_measure(double a = 0.1, double b = 1.0, double intensity = 5.0);
// c|x|^(-1-alpha) on [-b,-a] U [a,b], c chosen so the total mass is `intensity`.
JumpMeasureSpec symmetric_stable_measure(double alpha = 1.0, double a = 0.1, double b = 1.0,
                                         double intensity = 5.0);

// gamma[f, g](x) = x^2 f'(x) g'(x).
double gamma_bottom(const ScalarTestFunction& f, const ScalarTestFunction& g, double x);

// eta(r) = sqrt(12) (r - 1/2): centered with unit second moment on [0, 1].
double eta(double r);

// f^flat(x, r) = x f'(x) eta(r).
double flat(const ScalarTestFunction& f, double x, double r);

// a[h](x) = 1/2 (x^2 h''(x) + (2x + x^2 p'(x)/p(x)) h'(x)), valid for h with
// compact support in the interior of the jump support.
double generator_a(const ScalarTestFunction& h, double x, const JumpMeasureSpec& spec);

double sample_jump(const JumpMeasureSpec& spec, double u);

}  // namespace lp
