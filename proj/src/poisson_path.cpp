#include "lentparticle/poisson_path.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "lentparticle/errors.hpp"

namespace lp {

Configuration::Configuration(std::shared_ptr<const JumpMeasureSpec> spec, double horizon,
                             std::vector<Atom> atoms)
    : spec_(std::move(spec)), horizon_(horizon), atoms_(std::move(atoms)) {
    if (!spec_) {
        throw std::invalid_argument("configuration needs a jump measure");
    }
    if (!(horizon_ >= 0.0)) {
        throw DomainError("horizon must be nonnegative");
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const Atom& a = atoms_[i];
        if (!(a.time >= 0.0 && a.time <= horizon_)) {
            throw DomainError("atom time outside [0, T]");
        }
        if (a.size == 0.0 || !spec_->contains(a.size)) {
            throw DomainError("atom size outside the jump support");
        }
        if (i > 0 && !(atoms_[i - 1].time < a.time)) {
            throw std::invalid_argument("atom times must be strictly increasing");
        }
    }
}

Configuration Configuration::with_size(std::size_t i, double size) const {
    std::vector<Atom> atoms = atoms_;
    atoms.at(i).size = size;
    return Configuration(spec_, horizon_, std::move(atoms));
}

MarkSet::MarkSet(std::vector<double> marks) : marks_(std::move(marks)) {
    for (double r : marks_) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw DomainError("mark outside [0, 1]");
        }
    }
}

Configuration sample_configuration(std::shared_ptr<const JumpMeasureSpec> spec, double horizon,
                                   RandomStream& stream) {
    if (!(horizon >= 0.0)) {
        throw DomainError("horizon must be nonnegative");
    }
    const double mean = spec->total_mass() * horizon;
    std::size_t count = 0;
    if (mean > 0.0) {
        std::poisson_distribution<long> poisson(mean);
        count = static_cast<std::size_t>(poisson(stream));
    }
    std::vector<Atom> atoms(count);
    for (Atom& a : atoms) {
        a.time = horizon * stream.uniform();
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.time < b.time; });
    // Colliding times are redrawn until all are distinct.
    for (bool collided = true; collided;) {
        collided = false;
        for (std::size_t i = 1; i < atoms.size(); ++i) {
            if (atoms[i].time == atoms[i - 1].time) {
                atoms[i].time = horizon * stream.uniform();
                collided = true;
            }
        }
        if (collided) {
            std::sort(atoms.begin(), atoms.end(),
                      [](const Atom& a, const Atom& b) { return a.time < b.time; });
        }
    }
    for (Atom& a : atoms) {
        a.size = sample_jump(*spec, stream.uniform());
    }
    return Configuration(std::move(spec), horizon, std::move(atoms));
}

MarkSet attach_marks(const Configuration& config, RandomStream& stream) {
    std::vector<double> marks(config.size());
    for (double& r : marks) r = stream.uniform();
    return MarkSet(std::move(marks));
}

double path_value(const Configuration& config, double t) {
    if (!(t >= 0.0 && t <= config.horizon())) {
        throw DomainError("path_value: t outside [0, T]");
    }
    double y = 0.0;
    for (const Atom& a : config.atoms()) {
        if (a.time > t) break;
        y += a.size;
    }
    return y - t * config.spec().m1();
}

double path_left_limit(const Configuration& config, double t) {
    if (!(t > 0.0 && t <= config.horizon())) {
        throw DomainError("path_left_limit: t outside (0, T]");
    }
    double y = 0.0;
    for (const Atom& a : config.atoms()) {
        if (a.time >= t) break;
        y += a.size;
    }
    return y - t * config.spec().m1();
}

double quadratic_variation(const Configuration& config) {
    double qv = 0.0;
    for (const Atom& a : config.atoms()) qv += a.size * a.size;
    return qv;
}

}  // namespace lp
