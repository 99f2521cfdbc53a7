#pragma once

// Symmetric Gauss rules on the reference triangle {(x,y): x,y >= 0, x+y <= 1}.
// Points are barycentric triples, weights sum to the reference area 1/2.

#include <array>
#include <string>
#include <vector>

#include "tpns/errors.hpp"

namespace tpns {

struct QuadratureRule {
    std::vector<std::array<double, 3>> points;  // barycentric coordinates
    std::vector<double> weights;                // sum to 1/2
    int exact_degree = 0;
};

namespace detail {

inline void push_orbit1(QuadratureRule& rule, double w) {
    rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    rule.weights.push_back(0.5 * w);
}

// The three permutations of (a, a, 1-2a).
inline void push_orbit3(QuadratureRule& rule, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    rule.points.push_back({b, a, a});
    rule.points.push_back({a, b, a});
    rule.points.push_back({a, a, b});
    for (int i = 0; i < 3; ++i) rule.weights.push_back(0.5 * w);
}

// The six permutations of (a, b, 1-a-b).
inline void push_orbit6(QuadratureRule& rule, double a, double b, double w) {
    const double c = 1.0 - a - b;
    rule.points.push_back({a, b, c});
    rule.points.push_back({a, c, b});
    rule.points.push_back({b, a, c});
    rule.points.push_back({b, c, a});
    rule.points.push_back({c, a, b});
    rule.points.push_back({c, b, a});
    for (int i = 0; i < 6; ++i) rule.weights.push_back(0.5 * w);
}

}  // namespace detail

// Returns a symmetric rule exact to at least min_degree (supported: 1..6).
inline QuadratureRule quadrature(int min_degree) {
    if (min_degree < 1 || min_degree > 6)
        throw config_error("quadrature: unsupported degree " + std::to_string(min_degree) +
                           " (supported range is 1..6)");
    QuadratureRule rule;
    if (min_degree <= 2) {
        // 3-point degree-2 rule.
        detail::push_orbit3(rule, 1.0 / 6.0, 1.0 / 3.0);
        rule.exact_degree = 2;
    } else if (min_degree <= 4) {
        // 6-point degree-4 rule.
        detail::push_orbit3(rule, 0.44594849091596488631832925388305, 0.22338158967801146569500700843312);
        detail::push_orbit3(rule, 0.091576213509770743459571463402202, 0.10995174365532186763832632490021);
        rule.exact_degree = 4;
    } else {
        // 12-point degree-6 rule.
        detail::push_orbit3(rule, 0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
        detail::push_orbit3(rule, 0.063089014491502228340331602870819, 0.050844906370206816920936809106869);
        detail::push_orbit6(rule, 0.053145049844816947353249671631398, 0.31035245103378440541660773395655,
                            0.082851075618373575193553456420442);
        rule.exact_degree = 6;
    }
    return rule;
}

}  // namespace tpns
