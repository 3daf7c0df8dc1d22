#include "doctest.h"

#include <cmath>
#include <random>

#include "sizespec/control.hpp"
#include "sizespec/errors.hpp"
#include "problems.hpp"

using namespace sizespec;
using namespace sizespec::testing;

TEST_CASE("power utility")
{
    const PowerUtility linear(0.0);
    for (double y : {0.0, 0.3, 7.0, 1e5}) {
        CHECK(linear.rho(y) == y);
        CHECK(linear.inverse(y) == y);
        CHECK(linear.lambda(y) == 1.0);
    }

    const PowerUtility quad(1.0);
    CHECK(quad.rho(4.0) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(quad.inverse(8.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(quad.lambda(8.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::isinf(quad.lambda(0.0)));
    CHECK(PowerUtility(-0.5).lambda(0.0) == 0.0);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> psi(-0.9, 4.0), y(1e-3, 1e3);
    for (int n = 0; n < 100; ++n) {
        const PowerUtility u(psi(rng));
        const double v = y(rng);
        CHECK(std::abs(u.inverse(u.rho(v)) - v) <= 1e-12 * std::max(1.0, v));
        // lambda(rho(x)) = x^(-psi)
        CHECK(u.lambda(u.rho(v)) == doctest::Approx(std::pow(v, -u.psi())).epsilon(1e-10));
    }
    CHECK_THROWS_AS(PowerUtility(-1.0), std::domain_error);
}

TEST_CASE("harvest size")
{
    const auto problem = benchmark_problem();
    CHECK(harvest_fn(problem, 0.0) == 0.0);
    CHECK(harvest_fn(problem, 20.0) == 20.0);
    CHECK(harvest_fn(problem, 4000.0) == 40.0);
}

TEST_CASE("intensity maximizer")
{
    const auto problem = benchmark_problem();
    const auto interior = maximize_theta(1.0, -1.0, problem);
    CHECK(interior.theta == 1.0);  // unconstrained 250, clamped to U
    CHECK(interior.value == doctest::Approx(1.0 - 0.002));

    auto p = benchmark_parameters();
    p.u_bar = 500.0;
    const ControlProblem wide(spectrum_2025_tv(), p);
    CHECK(maximize_theta(1.0, -1.0, wide).theta == doctest::Approx(250.0).epsilon(1e-14));

    CHECK(maximize_theta(-1.0, -2.0, problem).theta == 0.0);
    CHECK(maximize_theta(0.0, 0.0, problem).theta == 0.0);
    CHECK(maximize_theta(2.0, 0.0, problem).theta == 1.0);
    // Convex with a tie at both ends goes to zero.
    CHECK(maximize_theta(-0.002, 1.0, problem).theta == 0.0);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ab(-500.0, 500.0);
    for (int n = 0; n < 2000; ++n) {
        const double A = ab(rng), B = ab(rng);
        const auto best = maximize_theta(A, B, problem);
        double scan = -1e300;
        for (int s = 0; s <= 1000; ++s) {
            const double th = s / 1000.0;
            scan = std::max(scan, A * th + p.k * B * th * th);
        }
        CHECK(best.value >= scan - 1e-9 * (std::abs(A) + std::abs(B)));
        CHECK(best.theta >= 0.0);
        CHECK(best.theta <= 1.0);
    }
}

TEST_CASE("stability bound")
{
    const auto problem = benchmark_problem();
    CHECK(stability_bound(problem) == doctest::Approx(1.0 / 1.0021).epsilon(1e-15));
    CHECK(stability_bound(problem) == doctest::Approx(0.99790).epsilon(1e-5));
    CHECK(check_stability_bound(problem, 0.01));
    CHECK_FALSE(check_stability_bound(problem, stability_bound(problem)));
    CHECK_FALSE(check_stability_bound(problem, 1.0));

    auto p = benchmark_parameters();
    p.u_bar = 0.0;
    const ControlProblem idle(spectrum_2025_tv(), p);
    CHECK(stability_bound(idle) == doctest::Approx(1e4));
    CHECK(check_stability_bound(idle, 9999.0));
}

TEST_CASE("convexity gap")
{
    const PowerUtility linear(0.0), convex(1.0), concave(-0.5);
    CHECK(lemma_b1_gap(linear, 3.0, 11.0) == 0.0);
    CHECK(lemma_b1_gap(convex, 5.0, 5.0) == 0.0);
    CHECK(lemma_b1_gap(concave, 5.0, 5.0) == 0.0);
    CHECK(lemma_b1_gap(convex, 2.0, 8.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::isinf(lemma_b1_gap(convex, 0.0, 1.0)));
    CHECK(lemma_b1_gap(convex, 0.0, 1.0) > 0.0);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> v(0.0, 50.0);
    for (int n = 0; n < 1000; ++n) {
        const double x = v(rng), y = v(rng);
        CHECK(lemma_b1_gap(convex, x, y) >= 0.0);
        CHECK(lemma_b1_gap(concave, x, y) <= 0.0);
    }
}

TEST_CASE("lattice construction")
{
    const auto problem = benchmark_problem();
    const auto lat = make_lattice(problem, 0.01);
    CHECK(lat.n_t == 12000);
    CHECK(lat.n_x == 100);
    CHECK(lat.n_w == 64);
    CHECK(lat.dx == 40.0);
    CHECK(lat.time(problem, lat.n_t) == doctest::Approx(181.0));
    CHECK(lat.terminal_mean_weight() == doctest::Approx(mean_weight(problem.spectrum(), 181.0)).epsilon(0.02));

    CHECK_THROWS_AS(make_lattice(problem, 1.0), InputError);
    CHECK_THROWS_AS(make_lattice(problem, 0.007), InputError);

    auto p = benchmark_parameters();
    p.x_bar = 4010.0;
    CHECK_THROWS_AS(ControlProblem(spectrum_2025_tv(), p), InputError);
    p = benchmark_parameters();
    p.gamma = 1.0;
    CHECK_THROWS_AS(ControlProblem(spectrum_2025_tv(), p), InputError);
    p = benchmark_parameters();
    p.t0 = 0.0;
    CHECK_THROWS_AS(ControlProblem(spectrum_2025_tv(), p), InputError);
}
