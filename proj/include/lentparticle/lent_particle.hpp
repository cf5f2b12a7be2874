#pragma once

// The lent particle method.
//
//   1. lend a particle: omega -> omega + delta_(alpha, x)
//   2. differentiate in its size: (eps+ F)^flat = x dF/dx eta(r)
//   3. integrate the square over the mark: gamma[eps+ F] = x^2 (dF/dx)^2
//   4. take the particle back by integrating against N, which merges the
//      lent atom with the atoms already present:
//
//        Gamma[F](omega) = sum_{(alpha_i, x_i) in omega} x_i^2 (dF/dx_i)^2.
//
// The gradient F^sharp = int (eps+ F)^flat d(N (.) rho) is realized with one
// mark per atom.

#include <complex>
#include <vector>

#include "lentparticle/functionals.hpp"
#include "lentparticle/poisson_path.hpp"

namespace lp {

// Creation operator. Inserts (time, size) in time order; returns the input
// unchanged if an atom already sits at `time`. DomainError if the size is
// outside the jump support or the time outside [0, T].
Configuration add_particle(const Configuration& config, double time, double size);

// d/dx F(eps+_{(time, x)} omega) at x = size. PreconditionError if `time`
// collides with an existing atom.
template <class Value>
Value lent_derivative(const Functional<Value>& F, const Configuration& config, double time, double size);

// x_i dF/dx_i for every atom: the coefficients of F^sharp in the marks.
template <class Value>
std::vector<Value> sharp_coefficients(const Functional<Value>& F, const Configuration& config);

// Gamma[F] = sum_i x_i^2 |dF/dx_i|^2.
template <class Value>
double gamma_up(const Functional<Value>& F, const Configuration& config);

enum class MarkLaw {
    uniform_eta,  // xi(r) = eta(r)
    gaussian,     // xi(r) = standard normal quantile of r
};

// Centered, unit-variance transform of a uniform mark under `law`.
double mark_weight(double r, MarkLaw law);

// F^sharp = sum_i x_i dF/dx_i xi(r_i). AlignmentError if the marks do not
// match the atoms.
template <class Value>
Value sharp_realization(const Functional<Value>& F, const Configuration& config, const MarkSet& marks,
                        MarkLaw law);

// Closed form for V = int phi(Y_{s-}) dY_s:
//   Gamma[V] = sum_alpha dY_alpha^2 (int_]alpha, T] phi'(Y_{s-}) dY_s + phi(Y_{alpha-}))^2,
// evaluated pathwise with the same drift quadrature as the functional.
double gamma_closed_form_oracle(const ScalarTestFunction& phi, const Configuration& config);

// sum_i x_i^2 ((F(x_i + h) - F(x_i - h)) / 2h)^2. If x_i +- h leaves the
// support, h is shrunk by 100 for that atom; DomainError if that fails too.
template <class Value>
double gamma_fd_oracle(const Functional<Value>& F, const Configuration& config, double h = 1e-5);

}  // namespace lp
