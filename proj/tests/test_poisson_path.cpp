#include <doctest.h>

#include <cmath>

#include "lentparticle/errors.hpp"
#include "lentparticle/poisson_path.hpp"
#include "support.hpp"

using namespace lp;
using lp::testing::cfg1;
using lp::testing::symmetric_spec;
using lp::testing::uniform_spec;

TEST_CASE("configuration validation") {
    const auto spec = symmetric_spec();
    CHECK_NOTHROW(Configuration(spec, 1.0, {{0.0, 0.5}, {1.0, -0.2}}));
    CHECK_THROWS_AS(Configuration(spec, -1.0, {}), DomainError);
    CHECK_THROWS_AS(Configuration(spec, 1.0, {{0.5, 0.5}, {0.5, 0.3}}), std::invalid_argument);
    CHECK_THROWS_AS(Configuration(spec, 1.0, {{0.7, 0.5}, {0.3, 0.3}}), std::invalid_argument);
    CHECK_THROWS_AS(Configuration(spec, 1.0, {{1.5, 0.5}}), DomainError);
    CHECK_THROWS_AS(Configuration(spec, 1.0, {{0.5, 0.05}}), DomainError);
    CHECK_THROWS_AS(Configuration(spec, 1.0, {{0.5, 0.0}}), DomainError);
    CHECK_THROWS_AS(MarkSet({0.2, 1.5}), DomainError);
}

TEST_CASE("path_value on the reference configuration") {
    const Configuration c = cfg1();
    CHECK(path_value(c, 0.0) == 0.0);
    CHECK(path_value(c, 0.5) == 0.5);
    CHECK(path_value(c, 0.7) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(path_left_limit(c, 0.7) == 0.5);
    CHECK(path_left_limit(c, 0.3) == 0.0);
    CHECK(path_value(c, 1.0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(path_value(c, 1.5), DomainError);
    CHECK_THROWS_AS(path_value(c, -0.1), DomainError);
    CHECK_THROWS_AS(path_left_limit(c, 0.0), DomainError);
}

TEST_CASE("path_value subtracts the compensator drift") {
    const Configuration c(uniform_spec(), 1.0, {{0.3, 0.5}});
    CHECK(path_value(c, 0.2) == doctest::Approx(-0.2 * 2.75).epsilon(1e-14));
    CHECK(path_value(c, 1.0) == doctest::Approx(0.5 - 2.75).epsilon(1e-14));
}

TEST_CASE("path jumps equal atom sizes and the path is cadlag") {
    for (std::uint64_t k = 0; k < 50; ++k) {
        RandomStream stream(7, k);
        const Configuration c = sample_configuration(uniform_spec(), 2.0, stream);
        for (const Atom& a : c.atoms()) {
            if (a.time == 0.0) continue;
            CHECK(path_value(c, a.time) - path_left_limit(c, a.time) ==
                  doctest::Approx(a.size).epsilon(1e-12));
            const double eps = 1e-9;
            if (a.time + eps <= c.horizon()) {
                CHECK(std::abs(path_value(c, a.time + eps) - path_value(c, a.time)) < 1e-7);
            }
        }
    }
}

TEST_CASE("sampled configurations: sorted, in support, Poisson mean count") {
    const std::size_t n = 20000;
    double total = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
        RandomStream stream(99, k);
        const Configuration c = sample_configuration(symmetric_spec(), 0.6, stream);
        for (std::size_t i = 0; i < c.size(); ++i) {
            REQUIRE(symmetric_spec()->contains(c[i].size));
            REQUIRE(c[i].time >= 0.0);
            REQUIRE(c[i].time <= 0.6);
            if (i > 0) REQUIRE(c[i - 1].time < c[i].time);
        }
        total += static_cast<double>(c.size());
    }
    // lambda T = 3, variance 3.
    CHECK(std::abs(total / n - 3.0) <= 4.0 * std::sqrt(3.0 / n));
}

TEST_CASE("degenerate horizons give empty configurations") {
    RandomStream a(1, 0);
    CHECK(sample_configuration(symmetric_spec(), 0.0, a).empty());
    std::size_t nonempty = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        RandomStream s(1, k);
        nonempty += sample_configuration(symmetric_spec(), 1e-12, s).empty() ? 0 : 1;
    }
    CHECK(nonempty == 0);
}

TEST_CASE("sampling is reproducible from (seed, path index)") {
    for (std::uint64_t k = 0; k < 20; ++k) {
        RandomStream s1(5, k);
        RandomStream s2(5, k);
        const Configuration c1 = sample_configuration(symmetric_spec(), 1.0, s1);
        const Configuration c2 = sample_configuration(symmetric_spec(), 1.0, s2);
        CHECK(c1 == c2);
        RandomStream m1(5, k, 1);
        RandomStream m2(5, k, 1);
        const MarkSet a = attach_marks(c1, m1);
        const MarkSet b = attach_marks(c2, m2);
        REQUIRE(a.size() == c1.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("marks are uniform on [0, 1]") {
    const std::size_t n = 200000;
    RandomStream stream(3, 0, 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = stream.uniform();
        REQUIRE(r > 0.0);
        REQUIRE(r < 1.0);
        sum += r;
    }
    CHECK(std::abs(sum / n - 0.5) <= 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("quadratic variation") {
    CHECK(quadratic_variation(cfg1()) == doctest::Approx(0.34).epsilon(1e-15));
    CHECK(quadratic_variation(lp::testing::empty_config()) == 0.0);
}

TEST_CASE("with_size replaces one jump size") {
    const Configuration c = cfg1().with_size(1, -0.9);
    CHECK(c[1].size == -0.9);
    CHECK(c[1].time == 0.7);
    CHECK(c[0] == cfg1()[0]);
    CHECK_THROWS(cfg1().with_size(0, 0.0));
}
