#include "lentparticle/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lentparticle/errors.hpp"
#include "lentparticle/parallel.hpp"

namespace lp {

namespace {

// Welford running mean and variance.
class Accumulator {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double std_error() const {
        if (n_ < 2) return 0.0;
        return std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_));
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct ComplexAccumulator {
    Accumulator re;
    Accumulator im;
    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    std::complex<double> mean() const { return {re.mean(), im.mean()}; }
    double std_error() const { return std::hypot(re.std_error(), im.std_error()); }
    double z_against(std::complex<double> target, double scale = 1.0) const {
        scale = std::max(scale, std::abs(target));
        return std::max(z_of(re.mean() - target.real(), re.std_error(), scale),
                        z_of(im.mean() - target.imag(), im.std_error(), scale));
    }
};

double relative_difference(double a, double b, double floor = 0.0) {
    const double denom = std::max({std::abs(a), std::abs(b), floor});
    if (denom == 0.0) return 0.0;
    return std::abs(a - b) / denom;
}

EstimateReport statistical(std::string name, std::complex<double> lhs, std::complex<double> rhs, double se,
                           std::size_t n, double z, const RunContext& ctx, std::string note = {}) {
    EstimateReport r;
    r.name = std::move(name);
    r.lhs_estimate = lhs;
    r.rhs_estimate = rhs;
    r.std_error = se;
    r.n_samples = n;
    r.z_score = z;
    r.threshold = ctx.z_max;
    r.pathwise = false;
    r.pass = z <= ctx.z_max;
    r.note = std::move(note);
    return r;
}

EstimateReport pathwise(std::string name, double max_rel, double tolerance, std::size_t n, std::string note = {}) {
    EstimateReport r;
    r.name = std::move(name);
    r.lhs_estimate = max_rel;
    r.rhs_estimate = 0.0;
    r.n_samples = n;
    r.z_score = max_rel;
    r.threshold = tolerance;
    r.pathwise = true;
    r.pass = max_rel <= tolerance;
    r.note = std::move(note);
    return r;
}

// Result of a per-configuration mark-resampling comparison.
struct MarkCheck {
    std::complex<double> lhs;
    std::complex<double> rhs;
    double se = 0.0;
    double z = 0.0;
};

// Aggregates per-configuration checks: means of both sides, worst z.
EstimateReport aggregate_mark_checks(std::string name, const std::vector<MarkCheck>& checks,
                                     std::size_t n_marks, const RunContext& ctx, std::string note = {}) {
    std::complex<double> lhs{};
    std::complex<double> rhs{};
    double worst_z = 0.0;
    double worst_se = 0.0;
    for (const MarkCheck& c : checks) {
        lhs += c.lhs;
        rhs += c.rhs;
        if (c.z >= worst_z) {
            worst_z = c.z;
            worst_se = c.se;
        }
    }
    const double n = checks.empty() ? 1.0 : static_cast<double>(checks.size());
    return statistical(std::move(name), lhs / n, rhs / n, worst_se, checks.size() * n_marks, worst_z, ctx,
                       std::move(note));
}

const GaussLegendre& mark_rule() { return gauss_legendre(256); }

}  // namespace

nlohmann::json EstimateReport::to_json() const {
    return {
        {"name", name},
        {"kind", pathwise ? "pathwise" : "statistical"},
        {"lhs_re", lhs_estimate.real()},
        {"lhs_im", lhs_estimate.imag()},
        {"rhs_re", rhs_estimate.real()},
        {"rhs_im", rhs_estimate.imag()},
        {"stderr", std_error},
        {"n_samples", n_samples},
        {"z_score", z_score},
        {"threshold", threshold},
        {"verdict", pass ? "pass" : "fail"},
        {"note", note},
    };
}

SampleStats summarize(std::span<const double> samples) {
    Accumulator acc;
    for (double x : samples) acc.add(x);
    return {acc.mean(), acc.std_error(), acc.count()};
}

double z_of(double diff, double se, double scale) {
    const double tol = 1e-12 * std::max(1.0, std::abs(scale));
    if (se > tol) return std::abs(diff) / se;
    return std::abs(diff) <= tol ? 0.0 : std::numeric_limits<double>::infinity();
}

Configuration path_configuration(const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon,
                                 std::uint64_t seed, std::uint64_t path) {
    RandomStream stream(seed, path, substream::configuration);
    return sample_configuration(spec, horizon, stream);
}

namespace kernels {

MarkedKernel size_times_eta() {
    return {"x*eta(r)", [](const Configuration&, double x, double r) { return x * eta(r); }};
}

MarkedKernel size_times_mark() {
    return {"x*r", [](const Configuration&, double x, double r) { return x * r; }};
}

MarkedKernel mark_free(ScalarTestFunction g) {
    const std::string name = g.name() + "(x)";
    return {name, [g = std::move(g)](const Configuration&, double x, double) { return g(x); }};
}

MarkedKernel mark_constant() {
    return {"1", [](const Configuration&, double, double) { return 1.0; }};
}

MarkedKernel path_weighted_eta() {
    return {"x*(1+Y_T^2)*eta(r)", [](const Configuration& c, double x, double r) {
                const double y = path_value(c, c.horizon());
                return x * (1.0 + y * y) * eta(r);
            }};
}

AtomKernel squared_size() {
    return {"x^2", [](const Configuration&, const Atom& a) { return a.size * a.size; }};
}

AtomKernel zero() {
    return {"0", [](const Configuration&, const Atom&) { return 0.0; }};
}

AtomKernel squared_size_times_linear_squared(const ScalarTestFunction& f, const JumpMeasureSpec& spec,
                                             double horizon) {
    RealFunctional lin = linear_functional(f, spec, horizon);
    return {"x^2*Ntilde(" + f.name() + ")^2", [lin](const Configuration& c, const Atom& a) {
                const double n = lin(c);
                return a.size * a.size * n * n;
            }};
}

}  // namespace kernels

EstimateReport check_isometry(const ScalarTestFunction& f, const std::shared_ptr<const JumpMeasureSpec>& spec,
                              double horizon, std::size_t n, const RunContext& ctx) {
    const RealFunctional lin = linear_functional(f, *spec, horizon);
    const double rhs = horizon * spec->integrate([&f](double x) { return f(x) * f(x); });
    const auto samples = parallel_map<double>(n, ctx.jobs, [&](std::size_t k) {
        const double v = lin(path_configuration(spec, horizon, ctx.seed, k));
        return v * v;
    });
    const SampleStats s = summarize(samples);
    return statistical("isometry", s.mean, rhs, s.std_error, n, z_of(s.mean - rhs, s.std_error, rhs), ctx,
                       "f=" + f.name());
}

EstimateReport check_integration_by_parts(const ScalarTestFunction& f, const ScalarTestFunction& h,
                         const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon, std::size_t n,
                         const RunContext& ctx) {
    if (!h.has_deriv2()) {
        throw CapabilityError("integration-by-parts: h needs a second derivative");
    }
    const double comp_f = horizon * spec->integrate([&f](double x) { return f(x); });
    const double comp_ah = horizon * spec->integrate([&](double x) { return generator_a(h, x, *spec); });
    const auto samples = parallel_map<std::complex<double>>(n, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        double n_f = 0.0;
        double n_ah = 0.0;
        double n_gamma = 0.0;
        for (const Atom& a : c.atoms()) {
            n_f += f(a.size);
            n_ah += generator_a(h, a.size, *spec);
            n_gamma += gamma_bottom(f, h, a.size);
        }
        return expi(n_f - comp_f) * std::complex<double>(n_ah - comp_ah, 0.5 * n_gamma);
    });
    ComplexAccumulator acc;
    for (const auto& z : samples) acc.add(z);
    return statistical("integration-by-parts", acc.mean(), 0.0, acc.std_error(), n, acc.z_against(0.0), ctx,
                       "f=" + f.name() + " h=" + h.name());
}

namespace {

std::vector<MarkCheck> run_marked_kernel(const MarkedKernel& kernel,
                                         const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon,
                                         std::size_t n_paths, std::size_t n_marks, const RunContext& ctx,
                                         bool require_centered) {
    const GaussLegendre& rule = mark_rule();
    return parallel_map<MarkCheck>(n_paths, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        double sum_mean = 0.0;
        double sum_mean_sq = 0.0;
        double sum_second = 0.0;
        for (const Atom& a : c.atoms()) {
            const double m = rule.integrate([&](double r) { return kernel.fn(c, a.size, r); }, 0.0, 1.0);
            const double abs_m =
                rule.integrate([&](double r) { return std::abs(kernel.fn(c, a.size, r)); }, 0.0, 1.0);
            const double q = rule.integrate(
                [&](double r) {
                    const double v = kernel.fn(c, a.size, r);
                    return v * v;
                },
                0.0, 1.0);
            if (require_centered && std::abs(m) > 1e-10 * (1.0 + abs_m)) {
                throw PreconditionError("kernel '" + kernel.name + "' is not centered in the mark");
            }
            sum_mean += m;
            sum_mean_sq += m * m;
            sum_second += q;
        }
        const double rhs = require_centered ? sum_second : sum_mean * sum_mean - sum_mean_sq + sum_second;

        RandomStream stream(ctx.seed, k, substream::marks);
        Accumulator acc;
        for (std::size_t m = 0; m < n_marks; ++m) {
            const MarkSet marks = attach_marks(c, stream);
            double s = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) s += kernel.fn(c, c[i].size, marks[i]);
            acc.add(s * s);
        }
        return MarkCheck{acc.mean(), rhs, acc.std_error(), z_of(acc.mean() - rhs, acc.std_error(), rhs)};
    });
}

}  // namespace

EstimateReport check_marked_isometry(const MarkedKernel& kernel, const std::shared_ptr<const JumpMeasureSpec>& spec,
                            double horizon, std::size_t n_paths, std::size_t n_marks, const RunContext& ctx) {
    const auto checks = run_marked_kernel(kernel, spec, horizon, n_paths, n_marks, ctx, true);
    return aggregate_mark_checks("marked-isometry", checks, n_marks, ctx, "kernel=" + kernel.name + "; worst configuration z");
}

EstimateReport check_second_moment_identity(const MarkedKernel& kernel,
                                            const std::shared_ptr<const JumpMeasureSpec>& spec,
                                            double horizon, std::size_t n_paths, std::size_t n_marks,
                                            const RunContext& ctx) {
    const auto checks = run_marked_kernel(kernel, spec, horizon, n_paths, n_marks, ctx, false);
    return aggregate_mark_checks("second-moment", checks, n_marks, ctx,
                                 "kernel=" + kernel.name + "; worst configuration z");
}

EstimateReport check_creation_identity(const AtomKernel& kernel, const std::shared_ptr<const JumpMeasureSpec>& spec,
                         double horizon, std::size_t n_paths, std::size_t n_inner, const RunContext& ctx) {
    if (n_inner == 0) {
        throw std::invalid_argument("creation: n_inner must be positive");
    }
    const double mass = spec->total_mass() * horizon;
    struct Pair {
        double lhs = 0.0;
        double rhs = 0.0;
    };
    const auto samples = parallel_map<Pair>(n_paths, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        Pair p;
        for (const Atom& a : c.atoms()) p.rhs += kernel.fn(c, a);
        if (horizon > 0.0) {
            RandomStream stream(ctx.seed, k, substream::auxiliary);
            double lent = 0.0;
            for (std::size_t m = 0; m < n_inner; ++m) {
                const Atom y{horizon * stream.uniform(), sample_jump(*spec, stream.uniform())};
                lent += kernel.fn(add_particle(c, y.time, y.size), y);
            }
            p.lhs = mass * lent / static_cast<double>(n_inner);
        }
        return p;
    });
    Accumulator lhs;
    Accumulator rhs;
    Accumulator diff;
    for (const Pair& p : samples) {
        lhs.add(p.lhs);
        rhs.add(p.rhs);
        diff.add(p.lhs - p.rhs);
    }
    return statistical("creation", lhs.mean(), rhs.mean(), diff.std_error(), n_paths,
                       z_of(diff.mean(), diff.std_error(), rhs.mean()), ctx,
                       "H=" + kernel.name + "; paired difference");
}

EstimateReport check_sharp_bilinear(const ScalarTestFunction& f, const ScalarTestFunction& g,
                              const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon,
                              std::size_t n_paths, std::size_t n_marks, const RunContext& ctx) {
    const ComplexFunctional F = exponential_functional(f, *spec, horizon);
    const ComplexFunctional G = exponential_functional(g, *spec, horizon);
    struct Both {
        MarkCheck bilinear;
        MarkCheck energy;
    };
    const auto results = parallel_map<Both>(n_paths, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        const auto cf = sharp_coefficients(F, c);
        const auto cg = sharp_coefficients(G, c);
        double n_gamma = 0.0;
        for (const Atom& a : c.atoms()) n_gamma += gamma_bottom(f, g, a.size);
        const std::complex<double> rhs9 = F(c) * std::conj(G(c)) * n_gamma;
        const double rhs12 = gamma_up(F, c);

        RandomStream stream(ctx.seed, k, substream::marks);
        ComplexAccumulator acc9;
        Accumulator acc12;
        for (std::size_t m = 0; m < n_marks; ++m) {
            const MarkSet marks = attach_marks(c, stream);
            std::complex<double> fs{};
            std::complex<double> gs{};
            for (std::size_t i = 0; i < c.size(); ++i) {
                const double w = eta(marks[i]);
                fs += cf[i] * w;
                gs += cg[i] * w;
            }
            acc9.add(fs * std::conj(gs));
            acc12.add(std::norm(fs));
        }
        Both b;
        b.bilinear = {acc9.mean(), rhs9, acc9.std_error(), acc9.z_against(rhs9)};
        b.energy = {acc12.mean(), rhs12, acc12.std_error(), z_of(acc12.mean() - rhs12, acc12.std_error(), rhs12)};
        return b;
    });
    std::vector<MarkCheck> all;
    for (const Both& b : results) {
        all.push_back(b.bilinear);
        all.push_back(b.energy);
    }
    EstimateReport r = aggregate_mark_checks(
        "sharp-bilinear", all, n_marks, ctx,
        "f=" + f.name() + " g=" + g.name() +
            "; pairing tested against N(gamma[f,g]) (the pathwise integral), worst of both identities");
    r.n_samples = n_paths * n_marks;
    return r;
}

EstimateReport check_generator_identity(const ScalarTestFunction& f, const ScalarTestFunction& g,
                          const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon, std::size_t n,
                          const RunContext& ctx) {
    const A0Operator a0({{1.0, f}}, *spec, horizon);
    const ComplexFunctional F = exponential_functional(f, *spec, horizon);
    const ComplexFunctional G = exponential_functional(g, *spec, horizon);
    struct Pair {
        std::complex<double> lhs;
        std::complex<double> rhs;
    };
    const auto samples = parallel_map<Pair>(n, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        const std::complex<double> g_bar = std::conj(G(c));
        double n_gamma = 0.0;
        for (const Atom& a : c.atoms()) n_gamma += gamma_bottom(f, g, a.size);
        // Phi' conj(Psi') = (i F) conj(i G) = F conj(G).
        return Pair{a0(c) * g_bar, -0.5 * F(c) * g_bar * n_gamma};
    });
    ComplexAccumulator lhs;
    ComplexAccumulator rhs;
    ComplexAccumulator diff;
    for (const Pair& p : samples) {
        lhs.add(p.lhs);
        rhs.add(p.rhs);
        diff.add(p.lhs - p.rhs);
    }
    return statistical("generator", lhs.mean(), rhs.mean(), diff.std_error(), n,
                       diff.z_against(0.0, std::abs(lhs.mean())), ctx,
                       "f=" + f.name() + " g=" + g.name() + "; paired difference");
}

EstimateReport check_gamma_linear(const std::vector<ScalarTestFunction>& fs,
                          const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon,
                          std::size_t n_paths, const RunContext& ctx) {
    std::vector<RealFunctional> lins;
    for (const ScalarTestFunction& f : fs) lins.push_back(linear_functional(f, *spec, horizon));
    const auto worst = parallel_map<double>(n_paths, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        double w = 0.0;
        for (std::size_t j = 0; j < fs.size(); ++j) {
            double direct = 0.0;
            for (const Atom& a : c.atoms()) direct += gamma_bottom(fs[j], fs[j], a.size);
            w = std::max(w, relative_difference(gamma_up(lins[j], c), direct));
        }
        return w;
    });
    return pathwise("gamma-linear", *std::max_element(worst.begin(), worst.end()), 1e-12, n_paths * fs.size(),
                    "max relative difference Gamma[N~ f] vs N(gamma[f])");
}

EstimateReport check_mark_laws(const RealFunctional& F, const std::shared_ptr<const JumpMeasureSpec>& spec,
                                double horizon, std::size_t n_paths, std::size_t n_marks, MarkLaw law,
                                const RunContext& ctx) {
    const auto checks = parallel_map<MarkCheck>(n_paths, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        const auto coeffs = sharp_coefficients(F, c);
        const double gamma = gamma_up(F, c);
        RandomStream stream(ctx.seed, k, substream::marks);
        Accumulator acc;
        for (std::size_t m = 0; m < n_marks; ++m) {
            const MarkSet marks = attach_marks(c, stream);
            double s = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) s += coeffs[i] * mark_weight(marks[i], law);
            acc.add(s * s);
        }
        return MarkCheck{acc.mean(), gamma, acc.std_error(), z_of(acc.mean() - gamma, acc.std_error(), gamma)};
    });
    const std::string law_name = law == MarkLaw::gaussian ? "gaussian" : "uniform-eta";
    return aggregate_mark_checks("mark-law-" + law_name, checks, n_marks, ctx,
                                 "F=" + F.name() + "; worst configuration z");
}

EstimateReport check_gamma_closed_form(const ScalarTestFunction& phi, const std::shared_ptr<const JumpMeasureSpec>& spec,
                          double horizon, std::size_t n_paths, const RunContext& ctx) {
    const RealFunctional V = stochastic_integral_functional(phi, *spec, horizon);
    const auto rel = parallel_map<double>(n_paths, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        return relative_difference(gamma_up(V, c), gamma_closed_form_oracle(phi, c));
    });
    const double tol = spec->m1() == 0.0 ? 1e-10 : 1e-6;
    return pathwise("gamma-closed-form", rel.empty() ? 0.0 : *std::max_element(rel.begin(), rel.end()), tol, n_paths,
                    "phi=" + phi.name() + "; max relative difference engine vs closed form");
}

template <class Value>
EstimateReport check_fd_oracle(const Functional<Value>& F, const std::shared_ptr<const JumpMeasureSpec>& spec,
                               double horizon, std::size_t n_paths, const RunContext& ctx) {
    const auto rel = parallel_map<double>(n_paths, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        // 1e-2 floor: 1e-6 relative with a 1e-8 absolute floor.
        return relative_difference(gamma_up(F, c), gamma_fd_oracle(F, c), 1e-2);
    });
    return pathwise("fd-oracle", rel.empty() ? 0.0 : *std::max_element(rel.begin(), rel.end()), 1e-6, n_paths,
                    "F=" + F.name() + "; max relative difference engine vs central differences");
}

template EstimateReport check_fd_oracle<double>(const RealFunctional&, const std::shared_ptr<const JumpMeasureSpec>&,
                                                double, std::size_t, const RunContext&);
template EstimateReport check_fd_oracle<std::complex<double>>(const ComplexFunctional&,
                                                              const std::shared_ptr<const JumpMeasureSpec>&,
                                                              double, std::size_t, const RunContext&);

DensityReport density_report(const ScalarTestFunction& phi, const std::shared_ptr<const JumpMeasureSpec>& spec,
                             double horizon, std::size_t n, const RunContext& ctx, std::size_t bins) {
    if (bins == 0) {
        throw std::invalid_argument("density_report: bins must be positive");
    }
    const RealFunctional V = stochastic_integral_functional(phi, *spec, horizon);
    DensityReport report;
    report.samples = parallel_map<DensitySample>(n, ctx.jobs, [&](std::size_t k) {
        const Configuration c = path_configuration(spec, horizon, ctx.seed, k);
        return DensitySample{k, V(c), gamma_up(V, c), !c.empty()};
    });

    std::vector<double> jumpy_values;
    for (const DensitySample& s : report.samples) {
        if (!s.has_jump) continue;
        ++report.jumpy_paths;
        if (s.gamma > 0.0) ++report.positive_paths;
        jumpy_values.push_back(s.v);
    }
    report.positivity_fraction = report.jumpy_paths == 0 ? 0.0
                                                          : static_cast<double>(report.positive_paths) /
                                                                static_cast<double>(report.jumpy_paths);
    std::sort(jumpy_values.begin(), jumpy_values.end());
    for (std::size_t i = 1; i < jumpy_values.size(); ++i) {
        if (jumpy_values[i] == jumpy_values[i - 1]) ++report.duplicate_count;
    }

    report.bin_counts.assign(bins, 0);
    if (!report.samples.empty()) {
        double lo = report.samples.front().v;
        double hi = lo;
        for (const DensitySample& s : report.samples) {
            lo = std::min(lo, s.v);
            hi = std::max(hi, s.v);
        }
        if (hi == lo) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double width = (hi - lo) / static_cast<double>(bins);
        for (std::size_t b = 0; b <= bins; ++b) {
            report.bin_edges.push_back(b == bins ? hi : lo + width * static_cast<double>(b));
        }
        for (const DensitySample& s : report.samples) {
            auto b = static_cast<std::size_t>((s.v - lo) / width);
            report.bin_counts[std::min(b, bins - 1)] += 1;
        }
    }
    return report;
}

}  // namespace lp
