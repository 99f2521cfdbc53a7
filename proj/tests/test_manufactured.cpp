// The closed-form rotating-sector solution: profile constants, wall
// conditions, the radial ODE, pressure decomposition, and time scaling.
// Frozen reference numbers were computed independently with extended-precision
// arithmetic from the defining formulas.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "tpns/manufactured.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

tpns::SectorProblem default_problem() {
    return tpns::SectorProblem(2.0, 3.0, 0.0, kPi / 2, 1.0, -1.0);
}

}  // namespace

TEST_CASE("profile constants match their frozen values", "[manufactured]") {
    const tpns::SectorProblem pr = default_problem();
    // alpha = (p_in - p_out) / (theta2 - theta1) = 2 / (pi/2) = 4/pi.
    CHECK(pr.alpha() == Catch::Approx(1.2732395447351628).epsilon(1e-15));
    // C = r1^2 r2^2 (log r2 - log r1) / (2 (r2^2 - r1^2)) with r1=2, r2=3.
    CHECK(pr.C() == Catch::Approx(1.4596743891893922).epsilon(1e-15));
    // D = -(r2^2 log r2 - r1^2 log r1) / (2 (r2^2 - r1^2)).
    CHECK(pr.D() == Catch::Approx(-0.71149218757732058).epsilon(1e-15));
    CHECK(pr.U(2.5) == Catch::Approx(-0.063021917712077435).epsilon(1e-14));
}

TEST_CASE("the azimuthal profile vanishes at both walls", "[manufactured]") {
    const tpns::SectorProblem pr = default_problem();
    CHECK(std::abs(pr.U(2.0)) <= 1e-12);
    CHECK(std::abs(pr.U(3.0)) <= 1e-12);
}

TEST_CASE("the profile solves its radial ODE", "[manufactured]") {
    // U'' + U'/r - U/r^2 = alpha/r, checked with central differences.
    const tpns::SectorProblem pr = default_problem();
    const double h = 1e-5;
    std::mt19937 rng(404);
    std::uniform_real_distribution<double> radius(2.05, 2.95);
    for (int trial = 0; trial < 12; ++trial) {
        const double r = radius(rng);
        const double upp = (pr.U(r + h) - 2.0 * pr.U(r) + pr.U(r - h)) / (h * h);
        const double up = (pr.U(r + h) - pr.U(r - h)) / (2.0 * h);
        const double residual = upp + up / r - pr.U(r) / (r * r) - pr.alpha() / r;
        REQUIRE(std::abs(residual) <= 1e-5);
    }
}

TEST_CASE("velocity is azimuthal with the frozen magnitude", "[manufactured]") {
    const tpns::SectorProblem pr = default_problem();
    const tpns::Vec2 v = pr.exact_velocity(2.5, 0.0, 0.0);
    CHECK(v[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(v[1] == Catch::Approx(0.063021917712077435).epsilon(1e-14));

    // At a general point the velocity is perpendicular to the radius.
    const tpns::Vec2 w = pr.exact_velocity(1.7, 1.9, 0.3);
    CHECK(std::abs(w[0] * 1.7 + w[1] * 1.9) < 1e-15);

    // Initial data is the t = 0 velocity.
    const tpns::Vec2 u0 = pr.initial_u0(1.7, 1.9);
    const tpns::Vec2 v0 = pr.exact_velocity(1.7, 1.9, 0.0);
    CHECK(u0[0] == v0[0]);
    CHECK(u0[1] == v0[1]);
}

TEST_CASE("boundary pressure data is the frozen total pressure", "[manufactured]") {
    const tpns::SectorProblem pr = default_problem();
    // theta = 0 side: static part p_in = 1 plus kinetic U(2.5)^2/2.
    CHECK(pr.boundary_pb(2.5, 0.0, 0.0) == Catch::Approx(1.001985881056054).epsilon(1e-14));
    // theta = pi/2 side: static part p_out = -1 plus the same kinetic term.
    CHECK(pr.boundary_pb(0.0, 2.5, 0.0) == Catch::Approx(-0.99801411894394609).epsilon(1e-14));
}

TEST_CASE("total pressure equals static plus kinetic", "[manufactured]") {
    const tpns::SectorProblem pr = default_problem();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> radius(2.0, 3.0), angle(0.0, kPi / 2), time(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double r = radius(rng), th = angle(rng), t = time(rng);
        const double x = r * std::cos(th), y = r * std::sin(th);
        const tpns::Vec2 u = pr.exact_velocity(x, y, t);
        const double kinetic = 0.5 * (u[0] * u[0] + u[1] * u[1]);
        const double total = pr.exact_total_pressure(x, y, t);
        const double stat = pr.exact_static_pressure(x, y, t);
        REQUIRE(total == Catch::Approx(stat + kinetic).margin(1e-15));
    }
}

TEST_CASE("the forcing has the frozen value on the inlet axis", "[manufactured]") {
    const tpns::SectorProblem pr = default_problem();
    const tpns::Vec2 f = pr.forcing_f(2.5, 0.0, 0.0);
    CHECK(f[0] == Catch::Approx(-0.0015887048448431438).epsilon(1e-13));
    CHECK(f[1] == Catch::Approx(-0.063021917712077435).epsilon(1e-13));
}

TEST_CASE("fields decay with their exponential time factors", "[manufactured]") {
    const tpns::SectorProblem pr = default_problem();
    const double x = 2.2, y = 1.1;
    const tpns::Vec2 v0 = pr.exact_velocity(x, y, 0.0);
    const tpns::Vec2 v1 = pr.exact_velocity(x, y, 1.0);
    CHECK(v1[0] == Catch::Approx(v0[0] * std::exp(-1.0)).epsilon(1e-13));
    CHECK(v1[1] == Catch::Approx(v0[1] * std::exp(-1.0)).epsilon(1e-13));

    // Static part scales like e^{-t}, kinetic part like e^{-2t}.
    const double s0 = pr.exact_static_pressure(x, y, 0.0);
    const double s1 = pr.exact_static_pressure(x, y, 1.0);
    CHECK(s1 == Catch::Approx(s0 * std::exp(-1.0)).epsilon(1e-13));
    const double k0 = pr.exact_total_pressure(x, y, 0.0) - s0;
    const double k1 = pr.exact_total_pressure(x, y, 1.0) - s1;
    CHECK(k1 == Catch::Approx(k0 * std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("the static pressure interpolates p_in to p_out in angle", "[manufactured]") {
    const tpns::SectorProblem pr = default_problem();
    CHECK(pr.p0(0.0) == Catch::Approx(1.0));
    CHECK(pr.p0(kPi / 2) == Catch::Approx(-1.0));
    CHECK(pr.p0(kPi / 4) == Catch::Approx(0.0).margin(1e-15));
    // Linear in theta: the midpoint value is the mean of any symmetric pair.
    const double a = pr.p0(0.3), b = pr.p0(kPi / 2 - 0.3);
    CHECK(a + b == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("evaluation at the origin is rejected", "[manufactured]") {
    const tpns::SectorProblem pr = default_problem();
    CHECK_THROWS_AS(pr.exact_velocity(0.0, 0.0, 0.0), tpns::config_error);
    CHECK_THROWS_AS(pr.U(0.0), tpns::config_error);
    CHECK_THROWS_AS(pr.U(-1.0), tpns::config_error);
}

TEST_CASE("degenerate geometry parameters are rejected", "[manufactured]") {
    CHECK_THROWS_AS(tpns::SectorProblem(0.0, 3.0, 0.0, kPi / 2, 1.0, -1.0), tpns::config_error);
    CHECK_THROWS_AS(tpns::SectorProblem(3.0, 2.0, 0.0, kPi / 2, 1.0, -1.0), tpns::config_error);
    CHECK_THROWS_AS(tpns::SectorProblem(2.0, 3.0, 1.0, 1.0, 1.0, -1.0), tpns::config_error);
}
