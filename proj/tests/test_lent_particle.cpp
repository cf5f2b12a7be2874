#include <doctest.h>

#include <cmath>
#include <complex>

#include "lentparticle/errors.hpp"
#include "lentparticle/lent_particle.hpp"
#include "support.hpp"

using namespace lp;
using lp::testing::cfg1;
using lp::testing::empty_config;
using lp::testing::random_config;
using lp::testing::symmetric_spec;
using lp::testing::uniform_spec;
using cplx = std::complex<double>;

TEST_CASE("add_particle") {
    const Configuration one = add_particle(empty_config(), 0.4, 0.6);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == Atom{0.4, 0.6});

    const Configuration three = add_particle(cfg1(), 0.5, 0.2);
    REQUIRE(three.size() == 3);
    CHECK(three[0].time == 0.3);
    CHECK(three[1].time == 0.5);
    CHECK(three[2].time == 0.7);
    CHECK(cfg1().size() == 2);

    CHECK(add_particle(cfg1(), 0.3, 0.9) == cfg1());
    CHECK_THROWS_AS(add_particle(cfg1(), 0.5, 0.05), DomainError);
    CHECK_THROWS_AS(add_particle(cfg1(), 1.5, 0.5), DomainError);
}

TEST_CASE("lent_derivative") {
    const auto spec = symmetric_spec();
    const auto f = fn::builtin("cubic");
    const RealFunctional L = linear_functional(f, *spec, 1.0);
    for (double x : {-0.8, 0.15, 0.6}) {
        CHECK(lent_derivative(L, cfg1(), 0.5, x) == doctest::Approx(f.deriv1(x)).epsilon(1e-14));
    }

    const RealFunctional V = stochastic_integral_functional(fn::identity(), *spec, 1.0);
    for (double x : {-0.9, -0.2, 0.3, 0.8}) {
        CHECK(lent_derivative(V, cfg1(), 0.5, x) == doctest::Approx(0.2).epsilon(1e-14));
        const double h = 1e-5;
        const double fd =
            (V(add_particle(cfg1(), 0.5, x + h)) - V(add_particle(cfg1(), 0.5, x - h))) / (2.0 * h);
        CHECK(fd == doctest::Approx(0.2).epsilon(1e-8));
    }

    const RealFunctional C = linear_functional(fn::constant(1.0), *spec, 1.0);
    CHECK(lent_derivative(C, cfg1(), 0.5, 0.4) == 0.0);
    CHECK_THROWS_AS(lent_derivative(V, cfg1(), 0.7, 0.4), PreconditionError);
}

TEST_CASE("gamma_up examples") {
    const auto spec = symmetric_spec();
    const RealFunctional L = linear_functional(fn::identity(), *spec, 1.0);
    CHECK(gamma_up(L, cfg1()) == doctest::Approx(0.34).epsilon(1e-15));
    CHECK(gamma_up(L, empty_config()) == 0.0);

    const RealFunctional V = stochastic_integral_functional(fn::identity(), *spec, 1.0);
    CHECK(std::abs(gamma_up(V, cfg1()) - 0.045) <= 1e-12);
    CHECK(std::abs(gamma_up(V, cfg1()) - gamma_closed_form_oracle(fn::identity(), cfg1())) <= 1e-12);

    // Hermitian convention: |i f' e^{i N~f}|^2 = f'^2.
    const ComplexFunctional E = exponential_functional(fn::identity(), *spec, 1.0);
    CHECK(gamma_up(E, cfg1()) == doctest::Approx(0.34).epsilon(1e-14));
}

TEST_CASE("sharp_realization examples") {
    const auto spec = symmetric_spec();
    const RealFunctional L = linear_functional(fn::identity(), *spec, 1.0);
    CHECK(sharp_realization(L, cfg1(), MarkSet({1.0, 0.5}), MarkLaw::uniform_eta) ==
          doctest::Approx(0.8660254037844386).epsilon(1e-15));
    const RealFunctional V = stochastic_integral_functional(fn::sigmoid(3.0), *spec, 1.0);
    CHECK(sharp_realization(V, cfg1(), MarkSet({0.5, 0.5}), MarkLaw::uniform_eta) == 0.0);
    CHECK(sharp_realization(V, cfg1(), MarkSet({0.5, 0.5}), MarkLaw::gaussian) == 0.0);
    CHECK_THROWS_AS(sharp_realization(L, cfg1(), MarkSet({0.2}), MarkLaw::uniform_eta), AlignmentError);
}

TEST_CASE("mark weights are centered with unit variance under both laws") {
    const GaussLegendre& rule = gauss_legendre(512);
    const double eta_mean = rule.integrate([](double r) { return mark_weight(r, MarkLaw::uniform_eta); }, 0.0, 1.0);
    const double eta_var =
        rule.integrate([](double r) { return std::pow(mark_weight(r, MarkLaw::uniform_eta), 2); }, 0.0, 1.0);
    CHECK(std::abs(eta_mean) <= 1e-12);
    CHECK(std::abs(eta_var - 1.0) <= 1e-12);
    CHECK(mark_weight(0.5, MarkLaw::gaussian) == 0.0);
    CHECK(mark_weight(0.975, MarkLaw::gaussian) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("mark-resampled mean of sharp squared equals gamma_up") {
    const auto spec = symmetric_spec();
    const RealFunctional L = linear_functional(fn::identity(), *spec, 1.0);
    const Configuration c = cfg1();
    for (MarkLaw law : {MarkLaw::uniform_eta, MarkLaw::gaussian}) {
        const std::size_t n = 100000;
        double sum = 0.0;
        double sum_sq = 0.0;
        double sum_lin = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            RandomStream stream(77, k, 1);
            const double s = sharp_realization(L, c, attach_marks(c, stream), law);
            sum += s * s;
            sum_sq += s * s * s * s;
            sum_lin += s;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        CHECK(std::abs(mean - 0.34) <= 4.0 * se);
        CHECK(std::abs(sum_lin / n) <= 4.0 * std::sqrt(0.34 / n));
    }
}

TEST_CASE("gamma_closed_form_oracle examples") {
    const double c = 1.7;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const Configuration cfg = random_config(symmetric_spec(), 1.0, 51, k);
        CHECK(gamma_closed_form_oracle(fn::constant(c), cfg) ==
              doctest::Approx(c * c * quadratic_variation(cfg)).epsilon(1e-13));
    }
    CHECK(gamma_closed_form_oracle(fn::identity(), empty_config()) == 0.0);
    CHECK(std::abs(gamma_closed_form_oracle(fn::identity(), cfg1()) - 0.045) <= 1e-12);
}

TEST_CASE("gamma_closed_form_oracle agrees with the engine, with and without drift") {
    const std::vector<ScalarTestFunction> phis{fn::identity(), fn::affine(0.3, 1.5), fn::bump(0.0, 1.5),
                                               fn::sigmoid(3.0)};
    for (const auto& spec : {symmetric_spec(), uniform_spec()}) {
        const double tol = spec->m1() == 0.0 ? 1e-10 : 1e-6;
        for (const auto& phi : phis) {
            const RealFunctional V = stochastic_integral_functional(phi, *spec, 1.0);
            for (std::uint64_t k = 0; k < 100; ++k) {
                const Configuration c = random_config(spec, 1.0, 61, k);
                const double engine = gamma_up(V, c);
                const double oracle = gamma_closed_form_oracle(phi, c);
                CHECK(std::abs(engine - oracle) <= tol * std::max(1.0, std::abs(oracle)));
            }
        }
    }
}

TEST_CASE("gamma_fd_oracle") {
    const auto spec = symmetric_spec();
    const RealFunctional L = linear_functional(fn::identity(), *spec, 1.0);
    for (std::uint64_t k = 0; k < 20; ++k) {
        const Configuration c = random_config(spec, 1.0, 71, k);
        CHECK(std::abs(gamma_fd_oracle(L, c) - quadratic_variation(c)) <= 1e-8);
    }
    CHECK(gamma_fd_oracle(L, empty_config()) == 0.0);

    const RealFunctional V = stochastic_integral_functional(fn::sigmoid(3.0), *spec, 1.0);
    for (std::uint64_t k = 0; k < 20; ++k) {
        const Configuration c = random_config(spec, 1.0, 72, k);
        const double g = gamma_up(V, c);
        CHECK(std::abs(gamma_fd_oracle(V, c) - g) <= 1e-6 * std::max(g, 1e-2));
    }

    // An atom near the support edge forces the shrunken step; one on the edge cannot be differenced.
    const Configuration near_edge(spec, 1.0, {{0.5, 1.0 - 5e-6}});
    CHECK(gamma_fd_oracle(L, near_edge) == doctest::Approx(std::pow(1.0 - 5e-6, 2)).epsilon(1e-8));
    const Configuration edge(spec, 1.0, {{0.5, 1.0}});
    CHECK_THROWS_AS(gamma_fd_oracle(L, edge), DomainError);
}

TEST_CASE("Gamma of a linear functional is N(gamma), pathwise") {
    const auto spec = symmetric_spec();
    const std::vector<ScalarTestFunction> fs{fn::identity(), fn::builtin("cubic"), fn::sigmoid(3.0),
                                             fn::bump(0.5, 0.4), fn::builtin("square")};
    for (const auto& f : fs) {
        const RealFunctional L = linear_functional(f, *spec, 1.0);
        for (std::uint64_t k = 0; k < 200; ++k) {
            const Configuration c = random_config(spec, 1.0, 81, k);
            double expected = 0.0;
            for (const Atom& a : c.atoms()) expected += gamma_bottom(f, f, a.size);
            CHECK(std::abs(gamma_up(L, c) - expected) <= 1e-12 * std::max(expected, 1e-300));
        }
    }
}

TEST_CASE("shift invariance and the chain rule upstairs") {
    const auto spec = uniform_spec();
    const RealFunctional V = stochastic_integral_functional(fn::sigmoid(3.0), *spec, 1.0);
    const auto outer = fn::builtin("cubic");
    const RealFunctional shifted_v = shifted(V, 2.5);
    const RealFunctional composed = compose(outer, V);
    for (std::uint64_t k = 0; k < 100; ++k) {
        const Configuration c = random_config(spec, 1.0, 91, k);
        const double g = gamma_up(V, c);
        CHECK(gamma_up(shifted_v, c) == g);
        const double d = outer.deriv1(V(c));
        CHECK(std::abs(gamma_up(composed, c) - d * d * g) <= 1e-10 * std::max(1.0, d * d * g));
    }
}

TEST_CASE("locality: functionals agreeing on size perturbations have equal Gamma") {
    const auto spec = symmetric_spec();
    // V_phi depends on phi only through its values along the path. Two phis that
    // coincide on [-1.5, 1.5] (where every perturbed path of CFG1 lives) but
    // differ far away give the same functional near CFG1.
    const auto phi = fn::sigmoid(3.0);
    const auto far = ScalarTestFunction::from_generic("sigmoid-far", [](const auto& y) {
        using std::exp;
        const auto base = 1.0 / (1.0 + exp(y * -3.0));
        const auto u = (y - 6.0) / 2.0;
        if (std::abs(value_of(u)) >= 1.0) return base;
        return base + exp(1.0 - 1.0 / (1.0 - u * u));
    });
    const RealFunctional A = stochastic_integral_functional(phi, *spec, 1.0);
    const RealFunctional B = stochastic_integral_functional(far, *spec, 1.0);
    const Configuration c = cfg1();
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (double x : {-1.0, -0.5, -0.1, 0.1, 0.5, 1.0}) CHECK(A(c.with_size(i, x)) == B(c.with_size(i, x)));
    }
    CHECK(gamma_up(A, c) == gamma_up(B, c));
    CHECK(B(Configuration(spec, 1.0, {{0.1, 1.0}, {0.2, 1.0}, {0.3, 1.0}, {0.4, 1.0}, {0.5, 1.0}, {0.6, 1.0}})) !=
          A(Configuration(spec, 1.0, {{0.1, 1.0}, {0.2, 1.0}, {0.3, 1.0}, {0.4, 1.0}, {0.5, 1.0}, {0.6, 1.0}})));
}

TEST_CASE("Gamma is nonnegative and independent of the marks") {
    const auto spec = symmetric_spec();
    const ComplexFunctional E = exponential_functional(fn::sigmoid(3.0), *spec, 1.0);
    for (std::uint64_t k = 0; k < 100; ++k) {
        const Configuration c = random_config(spec, 1.0, 101, k);
        const double g = gamma_up(E, c);
        CHECK(g >= 0.0);
        double manual = 0.0;
        for (const cplx& s : sharp_coefficients(E, c)) manual += std::norm(s);
        CHECK(g == doctest::Approx(manual).epsilon(1e-14));
    }
}
