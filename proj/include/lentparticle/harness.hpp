#pragma once

// Monte Carlo and pathwise verification of the identities satisfied by the
// lent particle construction, plus the energy-image-density diagnostic.
//
// Statistical checks report z = |lhs - rhs| / stderr and pass at z <= z_max.
// Complex quantities are tested componentwise and report the larger z.
// Pathwise checks report the largest relative discrepancy and pass at a
// fixed tolerance.

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lentparticle/bottom_space.hpp"
#include "lentparticle/functionals.hpp"
#include "lentparticle/lent_particle.hpp"
#include "lentparticle/poisson_path.hpp"

namespace lp {

struct EstimateReport {
    std::string name;
    std::complex<double> lhs_estimate;
    std::complex<double> rhs_estimate;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    double z_score = 0.0;  // relative discrepancy for pathwise checks
    double threshold = 4.0;
    bool pathwise = false;
    bool pass = false;
    std::string note;

    nlohmann::json to_json() const;
};

struct SampleStats {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

SampleStats summarize(std::span<const double> samples);

// |diff| / se. When se is at rounding level (relative to `scale`) the samples
// were constant, so the difference is compared to rounding level instead.
double z_of(double diff, double se, double scale = 1.0);

// Fixed inputs of every run.
struct RunContext {
    std::uint64_t seed = 42;
    unsigned jobs = 0;
    double z_max = 4.0;
};

// Configuration for path k of a run.
Configuration path_configuration(const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon,
                                 std::uint64_t seed, std::uint64_t path);

// F(omega, x, r): a kernel on atoms with a mark.
struct MarkedKernel {
    std::string name;
    std::function<double(const Configuration&, double, double)> fn;
};

// H(omega, (alpha, x)): a kernel on atoms.
struct AtomKernel {
    std::string name;
    std::function<double(const Configuration&, const Atom&)> fn;
};

namespace kernels {
MarkedKernel size_times_eta();               // x eta(r)
MarkedKernel size_times_mark();              // x r, not centered
MarkedKernel mark_free(ScalarTestFunction g);  // g(x)
MarkedKernel mark_constant();                // 1, not centered
// x (1 + Y_T(omega)^2) eta(r).
MarkedKernel path_weighted_eta();
AtomKernel squared_size();  // x^2
AtomKernel zero();
// x^2 N~(f)(omega)^2.
AtomKernel squared_size_times_linear_squared(const ScalarTestFunction& f, const JumpMeasureSpec& spec,
                                             double horizon);
}  // namespace kernels

// E (N~ f)^2 = T int f^2 dsigma.
EstimateReport check_isometry(const ScalarTestFunction& f, const std::shared_ptr<const JumpMeasureSpec>& spec,
                              double horizon, std::size_t n, const RunContext& ctx);

// E[exp(i N~ f) (N~(a[h]) + i/2 N(gamma[f, h]))] = 0.
EstimateReport check_integration_by_parts(const ScalarTestFunction& f, const ScalarTestFunction& h,
                         const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon, std::size_t n,
                         const RunContext& ctx);

// Per configuration, over marks: E^(int F d(N.rho))^2 = int F^2 dN drho for
// rho-centered kernels. PreconditionError for a kernel that is not centered.
EstimateReport check_marked_isometry(const MarkedKernel& kernel, const std::shared_ptr<const JumpMeasureSpec>& spec,
                            double horizon, std::size_t n_paths, std::size_t n_marks, const RunContext& ctx);

// Per configuration, over marks, any kernel:
//   E^(int F d(N.rho))^2 = (int F drho dN)^2 - int (int F drho)^2 dN + int F^2 drho dN.
EstimateReport check_second_moment_identity(const MarkedKernel& kernel,
                                            const std::shared_ptr<const JumpMeasureSpec>& spec,
                                            double horizon, std::size_t n_paths, std::size_t n_marks,
                                            const RunContext& ctx);

// E int eps+H dnu = E int H dN, the left side by lending n_inner particles
// drawn from dt x sigma per configuration.
EstimateReport check_creation_identity(const AtomKernel& kernel, const std::shared_ptr<const JumpMeasureSpec>& spec,
                         double horizon, std::size_t n_paths, std::size_t n_inner, const RunContext& ctx);

// Per configuration, over marks, with F = exp(i N~ f), G = exp(i N~ g):
//   E^[F# conj(G#)] = F conj(G) N(gamma[f, g])   and   E^|F#|^2 = Gamma[F].
EstimateReport check_sharp_bilinear(const ScalarTestFunction& f, const ScalarTestFunction& g,
                              const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon,
                              std::size_t n_paths, std::size_t n_marks, const RunContext& ctx);

// E[A0[F] conj(G)] = -1/2 E[Phi' conj(Psi') N(gamma[f, g])] for single-term
// exponentials, both sides on the same sample.
EstimateReport check_generator_identity(const ScalarTestFunction& f, const ScalarTestFunction& g,
                          const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon, std::size_t n,
                          const RunContext& ctx);

// Pathwise Gamma[N~(f)] = N(gamma[f]) for each f, tolerance 1e-12 relative.
EstimateReport check_gamma_linear(const std::vector<ScalarTestFunction>& fs,
                          const std::shared_ptr<const JumpMeasureSpec>& spec, double horizon,
                          std::size_t n_paths, const RunContext& ctx);

// Per configuration, over marks: E^ (F#)^2 = Gamma[F] under `law`.
EstimateReport check_mark_laws(const RealFunctional& F, const std::shared_ptr<const JumpMeasureSpec>& spec,
                                double horizon, std::size_t n_paths, std::size_t n_marks, MarkLaw law,
                                const RunContext& ctx);

// Pathwise Gamma[V] from the engine vs the closed form; tolerance 1e-10 when
// m1 = 0 and 1e-6 otherwise.
EstimateReport check_gamma_closed_form(const ScalarTestFunction& phi, const std::shared_ptr<const JumpMeasureSpec>& spec,
                          double horizon, std::size_t n_paths, const RunContext& ctx);

// Pathwise Gamma[F] from the engine vs central finite differences, 1e-6 relative.
template <class Value>
EstimateReport check_fd_oracle(const Functional<Value>& F, const std::shared_ptr<const JumpMeasureSpec>& spec,
                               double horizon, std::size_t n_paths, const RunContext& ctx);

struct DensitySample {
    std::uint64_t path = 0;
    double v = 0.0;
    double gamma = 0.0;
    bool has_jump = false;
};

struct DensityReport {
    std::vector<DensitySample> samples;
    std::size_t jumpy_paths = 0;
    std::size_t positive_paths = 0;   // jumpy paths with Gamma[V] > 0
    double positivity_fraction = 0.0;  // 0 when there is no jumpy path
    std::size_t duplicate_count = 0;   // exactly repeated V among jumpy paths
    std::vector<double> bin_edges;     // bins + 1 edges over [min V, max V]
    std::vector<std::size_t> bin_counts;
};

// Samples (V, Gamma[V]) for V = int phi(Y_{s-}) dY_s. std::invalid_argument
// for bins == 0.
DensityReport density_report(const ScalarTestFunction& phi, const std::shared_ptr<const JumpMeasureSpec>& spec,
                             double horizon, std::size_t n, const RunContext& ctx, std::size_t bins);

}  // namespace lp
