#include "lentparticle/functionals.hpp"

#include "lentparticle/errors.hpp"

namespace lp {

namespace {

// sum_i f(x_i) - compensator, in the scalar type of the sizes.
template <class S>
S compensated_sum(const ScalarTestFunction& f, std::span<const S> sizes, double compensator) {
    S acc{};
    for (const S& x : sizes) acc += f(x);
    return acc - compensator;
}

inline std::complex<double> scale(std::complex<double> c, std::complex<double> v) { return c * v; }
inline Dual<std::complex<double>> scale(std::complex<double> c, const Dual<std::complex<double>>& v) {
    return {c * v.value, c * v.deriv};
}

// int_a^b phi(y0 - m1 (s - a)) ds, 16-point Gauss-Legendre.
template <class S>
S drift_segment(const ScalarTestFunction& phi, const S& y0, double m1, double a, double b) {
    const GaussLegendre& rule = gauss_legendre(16);
    const double half = 0.5 * (b - a);
    S sum{};
    for (std::size_t k = 0; k < rule.order(); ++k) {
        const double s = a + half * (1.0 + rule.nodes()[k]);
        sum += rule.weights()[k] * phi(y0 - m1 * (s - a));
    }
    return sum * half;
}

}  // namespace

RealFunctional linear_functional(const ScalarTestFunction& f, const JumpMeasureSpec& spec, double horizon) {
    const double compensator = horizon * spec.integrate([&f](double x) { return f(x); });
    return make_functional<double>("linear:" + f.name(), [f, compensator](const Configuration&, auto sizes) {
        return compensated_sum(f, sizes, compensator);
    });
}

ComplexFunctional exponential_functional(const ScalarTestFunction& f, const JumpMeasureSpec& spec,
                                         double horizon) {
    const double compensator = horizon * spec.integrate([&f](double x) { return f(x); });
    return make_functional<std::complex<double>>(
        "exponential:" + f.name(),
        [f, compensator](const Configuration&, auto sizes) { return expi(compensated_sum(f, sizes, compensator)); });
}

ComplexFunctional exponential_sum_functional(const std::vector<ExponentialTerm>& terms,
                                             const JumpMeasureSpec& spec, double horizon) {
    std::vector<std::pair<ExponentialTerm, double>> prepared;
    for (const ExponentialTerm& t : terms) {
        const double compensator = horizon * spec.integrate([&t](double x) { return t.f(x); });
        prepared.emplace_back(t, compensator);
    }
    return make_functional<std::complex<double>>(
        "exponential-sum", [prepared](const Configuration&, auto sizes) {
            using S = typename decltype(sizes)::value_type;
            using R = decltype(expi(S{}));
            R acc{};
            for (const auto& [term, compensator] : prepared) {
                acc += scale(term.coeff, expi(compensated_sum(term.f, sizes, compensator)));
            }
            return acc;
        });
}

RealFunctional stochastic_integral_functional(const ScalarTestFunction& phi, const JumpMeasureSpec& spec,
                                              double horizon) {
    const double m1 = spec.m1();
    return make_functional<double>(
        "stochastic-integral:" + phi.name(), [phi, m1, horizon](const Configuration& config, auto sizes) {
            using S = typename decltype(sizes)::value_type;
            S y{};  // Y at the start of the current inter-jump interval
            S v{};
            double t_prev = 0.0;
            for (std::size_t j = 0; j < sizes.size(); ++j) {
                const double t = config[j].time;
                if (m1 != 0.0) {
                    v -= m1 * drift_segment(phi, y, m1, t_prev, t);
                }
                const S y_left = y - m1 * (t - t_prev);
                v += phi(y_left) * sizes[j];
                y = y_left + sizes[j];
                t_prev = t;
            }
            if (m1 != 0.0) {
                v -= m1 * drift_segment(phi, y, m1, t_prev, horizon);
            }
            return v;
        });
}

RealFunctional compose(const ScalarTestFunction& outer, const RealFunctional& inner) {
    return RealFunctional(
        outer.name() + "(" + inner.name() + ")",
        [outer, inner](const Configuration& c) { return outer(inner(c)); },
        [outer, inner](const Configuration& c, std::size_t i) { return outer(inner.evaluate_dual(c, i)); });
}

RealFunctional shifted(const RealFunctional& inner, double c) {
    return RealFunctional(
        inner.name() + "+c", [inner, c](const Configuration& config) { return inner(config) + c; },
        [inner, c](const Configuration& config, std::size_t i) { return inner.evaluate_dual(config, i) + c; });
}

A0Operator::A0Operator(std::vector<ExponentialTerm> terms, const JumpMeasureSpec& spec, double horizon)
    : spec_(std::make_shared<const JumpMeasureSpec>(spec)) {
    for (ExponentialTerm& t : terms) {
        if (!t.f.has_deriv2()) {
            throw CapabilityError("A0: test function '" + t.f.name() + "' has no second derivative");
        }
        const double comp_f = horizon * spec.integrate([&t](double x) { return t.f(x); });
        const double comp_af =
            horizon * spec.integrate([&t, &spec](double x) { return generator_a(t.f, x, spec); });
        terms_.push_back({std::move(t), comp_f, comp_af});
    }
}

std::complex<double> A0Operator::operator()(const Configuration& config) const {
    std::complex<double> total{};
    for (const Prepared& p : terms_) {
        double n_f = 0.0;
        double n_af = 0.0;
        double n_gamma = 0.0;
        for (const Atom& a : config.atoms()) {
            n_f += p.term.f(a.size);
            n_af += generator_a(p.term.f, a.size, *spec_);
            n_gamma += gamma_bottom(p.term.f, p.term.f, a.size);
        }
        const std::complex<double> e = expi(n_f - p.compensator_f);
        total += p.term.coeff * e * std::complex<double>(-0.5 * n_gamma, n_af - p.compensator_af);
    }
    return total;
}

std::complex<double> apply_A0(const std::vector<ExponentialTerm>& terms, const Configuration& config,
                              const JumpMeasureSpec& spec, double horizon) {
    return A0Operator(terms, spec, horizon)(config);
}

}  // namespace lp
