#pragma once

#include <cstdint>
#include <memory>

#include "lentparticle/bottom_space.hpp"
#include "lentparticle/poisson_path.hpp"

namespace lp::testing {

inline std::shared_ptr<const JumpMeasureSpec> symmetric_spec() {
    static const auto spec = std::make_shared<const JumpMeasureSpec>(symmetric_stable_measure());
    return spec;
}

inline std::shared_ptr<const JumpMeasureSpec> uniform_spec() {
    static const auto spec = std::make_shared<const JumpMeasureSpec>(uniform_measure());
    return spec;
}

// T = 1, atoms (0.3, +0.5), (0.7, -0.3) under the symmetric measure (m1 = 0).
inline Configuration cfg1() { return Configuration(symmetric_spec(), 1.0, {{0.3, 0.5}, {0.7, -0.3}}); }

inline Configuration empty_config(std::shared_ptr<const JumpMeasureSpec> spec = symmetric_spec(),
                                  double horizon = 1.0) {
    return Configuration(std::move(spec), horizon, {});
}

inline Configuration random_config(std::shared_ptr<const JumpMeasureSpec> spec, double horizon, std::uint64_t seed,
                                   std::uint64_t index) {
    RandomStream stream(seed, index);
    return sample_configuration(std::move(spec), horizon, stream);
}

}  // namespace lp::testing
