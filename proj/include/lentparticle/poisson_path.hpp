#pragma once

// Finite configurations of the Poisson random measure N with intensity
// dt x sigma on [0, T], their i.i.d. uniform marks (the marked measure
// N (.) rho with rho = Lebesgue on [0, 1]) and the compensated pure-jump path
//   Y_t = sum_{alpha_i <= t} x_i - t m1.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lentparticle/bottom_space.hpp"
#include "lentparticle/rng.hpp"

namespace lp {

struct Atom {
    double time = 0.0;
    double size = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

class Configuration {
public:
    // Validates: sizes nonzero and in the support, times in [0, T] and
    // strictly increasing.
    Configuration(std::shared_ptr<const JumpMeasureSpec> spec, double horizon, std::vector<Atom> atoms);

    double horizon() const { return horizon_; }
    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    const Atom& operator[](std::size_t i) const { return atoms_[i]; }

    const JumpMeasureSpec& spec() const { return *spec_; }
    const std::shared_ptr<const JumpMeasureSpec>& spec_ptr() const { return spec_; }

    // Copy with atom i's jump size replaced (time order is unaffected).
    Configuration with_size(std::size_t i, double size) const;

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.spec_ == b.spec_ && a.horizon_ == b.horizon_ && a.atoms_ == b.atoms_;
    }

private:
    std::shared_ptr<const JumpMeasureSpec> spec_;
    double horizon_;
    std::vector<Atom> atoms_;
};

class MarkSet {
public:
    MarkSet() = default;
    explicit MarkSet(std::vector<double> marks);

    std::span<const double> marks() const { return marks_; }
    std::size_t size() const { return marks_.size(); }
    bool empty() const { return marks_.empty(); }
    double operator[](std::size_t i) const { return marks_[i]; }

private:
    std::vector<double> marks_;
};

Configuration sample_configuration(std::shared_ptr<const JumpMeasureSpec> spec, double horizon,
                                   RandomStream& stream);

MarkSet attach_marks(const Configuration& config, RandomStream& stream);

// Y_t, right-continuous. DomainError for t outside [0, T].
double path_value(const Configuration& config, double t);
// Y_{t-}. DomainError for t outside (0, T].
double path_left_limit(const Configuration& config, double t);

// [Y, Y]_T = sum of squared jump sizes.
double quadratic_variation(const Configuration& config);

}  // namespace lp
