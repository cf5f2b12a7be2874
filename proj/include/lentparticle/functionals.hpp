#pragma once

// Poisson functionals: deterministic maps F(omega) of a Configuration that
// can also be evaluated in dual arithmetic with respect to the jump size of
// one designated atom.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lentparticle/bottom_space.hpp"
#include "lentparticle/dual.hpp"
#include "lentparticle/poisson_path.hpp"

namespace lp {

// Value and derivative with respect to one jump size.
template <class Value>
using PerturbedValue = Dual<Value>;

template <class Value>
class Functional {
public:
    using value_type = Value;
    using Eval = std::function<Value(const Configuration&)>;
    using EvalDual = std::function<Dual<Value>(const Configuration&, std::size_t)>;

    Functional(std::string name, Eval eval, EvalDual eval_dual)
        : name_(std::move(name)), eval_(std::move(eval)), eval_dual_(std::move(eval_dual)) {}

    Value operator()(const Configuration& config) const { return eval_(config); }
    Value evaluate(const Configuration& config) const { return eval_(config); }

    // Value together with d/dx_i, x_i the size of atom `atom`.
    PerturbedValue<Value> evaluate_dual(const Configuration& config, std::size_t atom) const {
        if (atom >= config.size()) {
            throw std::out_of_range("evaluate_dual: atom index out of range");
        }
        return eval_dual_(config, atom);
    }

    const std::string& name() const { return name_; }

private:
    std::string name_;
    Eval eval_;
    EvalDual eval_dual_;
};

using RealFunctional = Functional<double>;
using ComplexFunctional = Functional<std::complex<double>>;

// Wraps a callable generic in the scalar type of the jump sizes:
//   body(config, std::span<const S> sizes) -> Value      for S = double
//                                          -> Dual<Value> for S = Dual<double>
template <class Value, class Body>
Functional<Value> make_functional(std::string name, Body body) {
    auto eval = [body](const Configuration& config) {
        std::vector<double> sizes;
        sizes.reserve(config.size());
        for (const Atom& a : config.atoms()) sizes.push_back(a.size);
        return Value(body(config, std::span<const double>(sizes)));
    };
    auto eval_dual = [body](const Configuration& config, std::size_t atom) {
        std::vector<Dual<double>> sizes;
        sizes.reserve(config.size());
        for (std::size_t i = 0; i < config.size(); ++i) {
            sizes.emplace_back(config[i].size, i == atom ? 1.0 : 0.0);
        }
        return Dual<Value>(body(config, std::span<const Dual<double>>(sizes)));
    };
    return Functional<Value>(std::move(name), std::move(eval), std::move(eval_dual));
}

// N~(f) = sum_i f(x_i) - T int f dsigma.
RealFunctional linear_functional(const ScalarTestFunction& f, const JumpMeasureSpec& spec, double horizon);

// exp(i N~(f)).
ComplexFunctional exponential_functional(const ScalarTestFunction& f, const JumpMeasureSpec& spec,
                                         double horizon);

struct ExponentialTerm {
    std::complex<double> coeff;
    ScalarTestFunction f;
};

// sum_p coeff_p exp(i N~(f_p)), an element of the exponential pre-domain.
ComplexFunctional exponential_sum_functional(const std::vector<ExponentialTerm>& terms,
                                             const JumpMeasureSpec& spec, double horizon);

// V = int_0^T phi(Y_{s-}) dY_s
//   = sum_j phi(Y_{alpha_j-}) x_j - m1 int_0^T phi(Y_s) ds,
// the drift integral by 16-point Gauss-Legendre on each inter-jump interval.
RealFunctional stochastic_integral_functional(const ScalarTestFunction& phi, const JumpMeasureSpec& spec,
                                              double horizon);

// Phi o F for a smooth scalar Phi.
RealFunctional compose(const ScalarTestFunction& outer, const RealFunctional& inner);

// F + c.
RealFunctional shifted(const RealFunctional& inner, double c);

// A_0[F] = sum_p coeff_p exp(i N~(f_p)) (i N~(a[f_p]) - 1/2 N(gamma[f_p])).
// The compensators T int f_p dsigma and T int a[f_p] dsigma are computed once
// at construction. Throws CapabilityError if some f_p lacks a second
// derivative.
class A0Operator {
public:
    A0Operator(std::vector<ExponentialTerm> terms, const JumpMeasureSpec& spec, double horizon);

    std::complex<double> operator()(const Configuration& config) const;

private:
    struct Prepared {
        ExponentialTerm term;
        double compensator_f;
        double compensator_af;
    };
    std::vector<Prepared> terms_;
    std::shared_ptr<const JumpMeasureSpec> spec_;
};

std::complex<double> apply_A0(const std::vector<ExponentialTerm>& terms, const Configuration& config,
                              const JumpMeasureSpec& spec, double horizon);

}  // namespace lp
