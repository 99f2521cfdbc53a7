#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tpns/errors.hpp"
#include "tpns/quadrature.hpp"

using namespace tpns;

namespace {

// integral of x^a y^b over the unit reference triangle, a! b! / (a+b+2)!.
double monomial_exact(int a, int b) {
    double num = 1.0;
    for (int i = 2; i <= a; ++i) num *= i;
    for (int i = 2; i <= b; ++i) num *= i;
    double den = 1.0;
    for (int i = 2; i <= a + b + 2; ++i) den *= i;
    return num / den;
}

double apply_rule(const QuadratureRule& rule, int a, int b) {
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q)
        sum += rule.weights[q] * std::pow(rule.points[q][1], a) * std::pow(rule.points[q][2], b);
    return sum;
}

}  // namespace

TEST_CASE("each rule integrates monomials to its stated degree", "[quadrature]") {
    for (int degree : {2, 4, 6}) {
        const QuadratureRule rule = quadrature(degree);
        REQUIRE(rule.exact_degree >= degree);
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                const double exact = monomial_exact(a, b);
                INFO("degree " << degree << " monomial x^" << a << " y^" << b);
                CHECK(std::abs(apply_rule(rule, a, b) - exact) <= 1e-13 * exact);
            }
        }
    }
}

TEST_CASE("weights sum to the reference area", "[quadrature]") {
    for (int degree : {1, 3, 6}) {
        const QuadratureRule rule = quadrature(degree);
        double sum = 0.0;
        for (double w : rule.weights) sum += w;
        CHECK(sum == Catch::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("points lie inside the closed reference triangle", "[quadrature]") {
    for (int degree : {2, 4, 6}) {
        for (const auto& p : quadrature(degree).points) {
            CHECK(p[0] >= 0.0);
            CHECK(p[1] >= 0.0);
            CHECK(p[2] >= 0.0);
            CHECK(p[0] + p[1] + p[2] == Catch::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("requested degree maps to the cheapest sufficient rule", "[quadrature]") {
    CHECK(quadrature(1).points.size() == 3);
    CHECK(quadrature(2).points.size() == 3);
    CHECK(quadrature(3).points.size() == 6);
    CHECK(quadrature(4).points.size() == 6);
    CHECK(quadrature(5).points.size() == 12);
    CHECK(quadrature(6).points.size() == 12);
    CHECK(quadrature(6).exact_degree == 6);
}

TEST_CASE("unsupported degrees are rejected", "[quadrature]") {
    CHECK_THROWS_AS(quadrature(0), config_error);
    CHECK_THROWS_AS(quadrature(7), config_error);
}

TEST_CASE("spot value: x^6 over the reference triangle", "[quadrature]") {
    // 6! 0! / 8! = 1/56
    CHECK(apply_rule(quadrature(6), 6, 0) == Catch::Approx(1.0 / 56.0).epsilon(1e-14));
}
