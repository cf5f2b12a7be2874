#include "lentparticle/lent_particle.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/erf.hpp>

#include "lentparticle/errors.hpp"

namespace lp {

namespace {

double squared_modulus(double v) { return v * v; }
double squared_modulus(const std::complex<double>& v) { return std::norm(v); }

}  // namespace

Configuration add_particle(const Configuration& config, double time, double size) {
    if (!config.spec().contains(size) || size == 0.0) {
        throw DomainError("add_particle: size outside the jump support");
    }
    if (!(time >= 0.0 && time <= config.horizon())) {
        throw DomainError("add_particle: time outside [0, T]");
    }
    const auto atoms = config.atoms();
    const auto pos = std::lower_bound(atoms.begin(), atoms.end(), time,
                                      [](const Atom& a, double t) { return a.time < t; });
    if (pos != atoms.end() && pos->time == time) {
        return config;
    }
    std::vector<Atom> out(atoms.begin(), pos);
    out.push_back({time, size});
    out.insert(out.end(), pos, atoms.end());
    return Configuration(config.spec_ptr(), config.horizon(), std::move(out));
}

template <class Value>
Value lent_derivative(const Functional<Value>& F, const Configuration& config, double time, double size) {
    const Configuration lent = add_particle(config, time, size);
    if (lent.size() == config.size()) {
        throw PreconditionError("lent_derivative: time collides with an existing atom");
    }
    const auto atoms = lent.atoms();
    const auto pos = std::find_if(atoms.begin(), atoms.end(), [time](const Atom& a) { return a.time == time; });
    return F.evaluate_dual(lent, static_cast<std::size_t>(pos - atoms.begin())).deriv;
}

template <class Value>
std::vector<Value> sharp_coefficients(const Functional<Value>& F, const Configuration& config) {
    std::vector<Value> coeffs(config.size());
    for (std::size_t i = 0; i < config.size(); ++i) {
        coeffs[i] = config[i].size * F.evaluate_dual(config, i).deriv;
    }
    return coeffs;
}

template <class Value>
double gamma_up(const Functional<Value>& F, const Configuration& config) {
    double total = 0.0;
    for (std::size_t i = 0; i < config.size(); ++i) {
        const double x = config[i].size;
        total += x * x * squared_modulus(F.evaluate_dual(config, i).deriv);
    }
    return total;
}

double mark_weight(double r, MarkLaw law) {
    switch (law) {
        case MarkLaw::uniform_eta:
            return eta(r);
        case MarkLaw::gaussian:
            if (!(r > 0.0 && r < 1.0)) {
                throw DomainError("gaussian mark law needs r in (0, 1)");
            }
            return std::sqrt(2.0) * boost::math::erf_inv(2.0 * r - 1.0);
    }
    throw DomainError("unknown mark law");
}

template <class Value>
Value sharp_realization(const Functional<Value>& F, const Configuration& config, const MarkSet& marks,
                        MarkLaw law) {
    if (marks.size() != config.size()) {
        throw AlignmentError("sharp_realization: marks and atoms differ in length");
    }
    Value total{};
    for (std::size_t i = 0; i < config.size(); ++i) {
        total += config[i].size * F.evaluate_dual(config, i).deriv * mark_weight(marks[i], law);
    }
    return total;
}

double gamma_closed_form_oracle(const ScalarTestFunction& phi, const Configuration& config) {
    const std::size_t n = config.size();
    if (n == 0) return 0.0;
    const double m1 = config.spec().m1();
    const GaussLegendre& rule = gauss_legendre(16);

    // Left limits at each jump, stepped exactly as the functional steps them.
    std::vector<double> y_left(n);
    double y = 0.0;
    double t_prev = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        y_left[j] = y - m1 * (config[j].time - t_prev);
        y = y_left[j] + config[j].size;
        t_prev = config[j].time;
    }

    double gamma = 0.0;
    double tail = 0.0;  // int_]alpha_i, T] phi'(Y_{s-}) dY_s
    for (std::size_t i = n; i-- > 0;) {
        if (m1 != 0.0) {
            const double a = config[i].time;
            const double b = (i + 1 < n) ? config[i + 1].time : config.horizon();
            const double y0 = y_left[i] + config[i].size;
            const double half = 0.5 * (b - a);
            double seg = 0.0;
            for (std::size_t k = 0; k < rule.order(); ++k) {
                const double s = a + half * (1.0 + rule.nodes()[k]);
                seg += rule.weights()[k] * phi.deriv1(y0 - m1 * (s - a));
            }
            tail -= m1 * (seg * half);
        }
        const double x = config[i].size;
        const double inner = tail + phi(y_left[i]);
        gamma += x * x * inner * inner;
        tail += phi.deriv1(y_left[i]) * x;
    }
    return gamma;
}

template <class Value>
double gamma_fd_oracle(const Functional<Value>& F, const Configuration& config, double h) {
    if (!(h > 0.0)) {
        throw DomainError("gamma_fd_oracle: step must be positive");
    }
    const JumpMeasureSpec& spec = config.spec();
    double total = 0.0;
    for (std::size_t i = 0; i < config.size(); ++i) {
        const double x = config[i].size;
        double step = h;
        if (!spec.contains(x + step) || !spec.contains(x - step)) {
            step = h / 100.0;
            if (!spec.contains(x + step) || !spec.contains(x - step)) {
                throw DomainError("gamma_fd_oracle: perturbed size leaves the support");
            }
        }
        const Value up = F(config.with_size(i, x + step));
        const Value down = F(config.with_size(i, x - step));
        total += x * x * squared_modulus((up - down) / (2.0 * step));
    }
    return total;
}

#define LP_INSTANTIATE(V)                                                                                   \
    template V lent_derivative<V>(const Functional<V>&, const Configuration&, double, double);             \
    template std::vector<V> sharp_coefficients<V>(const Functional<V>&, const Configuration&);             \
    template double gamma_up<V>(const Functional<V>&, const Configuration&);                               \
    template V sharp_realization<V>(const Functional<V>&, const Configuration&, const MarkSet&, MarkLaw); \
    template double gamma_fd_oracle<V>(const Functional<V>&, const Configuration&, double);

LP_INSTANTIATE(double)
LP_INSTANTIATE(std::complex<double>)

#undef LP_INSTANTIATE

}  // namespace lp
