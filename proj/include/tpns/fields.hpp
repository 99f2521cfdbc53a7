#pragma once

// Pointwise evaluation of discrete fields and quadrature-based norms.
// The end-of-step velocity u = u* - tau * grad(P) is kept as a per-element
// composite (P2 polynomial minus an element-constant vector); it is evaluated
// directly and never re-interpolated into the P2 space.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "tpns/fem.hpp"
#include "tpns/mesh.hpp"
#include "tpns/quadrature.hpp"

namespace tpns {

// Reference basis tables evaluated once per quadrature rule.
struct BasisTable {
    std::vector<P2Basis> p2;
    std::vector<P1Basis> p1;

    explicit BasisTable(const QuadratureRule& quad) {
        p2.reserve(quad.points.size());
        p1.reserve(quad.points.size());
        for (const auto& b : quad.points) {
            p2.push_back(eval_p2_basis(b));
            p1.push_back(eval_p1_basis(b));
        }
    }
};

inline Vec2 eval_p2_field(const DofMap& dofmap, const std::vector<double>& coeffs, int elem,
                          const P2Basis& basis) {
    const auto& nodes = dofmap.cell_nodes(elem);
    Vec2 v{0.0, 0.0};
    for (int i = 0; i < 6; ++i) {
        v[0] += coeffs[dofmap.velocity_dof(nodes[i], 0)] * basis.value[i];
        v[1] += coeffs[dofmap.velocity_dof(nodes[i], 1)] * basis.value[i];
    }
    return v;
}

// Physical Jacobian of a vector P2 field: rows are components, columns are
// d/dx and d/dy.
inline std::array<Vec2, 2> eval_p2_jacobian(const DofMap& dofmap, const std::vector<double>& coeffs,
                                            int elem, const P2Basis& basis,
                                            const ElementGeometry& geom) {
    const auto& nodes = dofmap.cell_nodes(elem);
    std::array<Vec2, 2> jac{{{0.0, 0.0}, {0.0, 0.0}}};
    for (int i = 0; i < 6; ++i) {
        const Vec2 g = geom.to_physical_grad(basis.grad[i]);
        const double cx = coeffs[dofmap.velocity_dof(nodes[i], 0)];
        const double cy = coeffs[dofmap.velocity_dof(nodes[i], 1)];
        jac[0][0] += cx * g[0];
        jac[0][1] += cx * g[1];
        jac[1][0] += cy * g[0];
        jac[1][1] += cy * g[1];
    }
    return jac;
}

inline double eval_p1_field(const TriMesh& mesh, const std::vector<double>& coeffs, int elem,
                            const P1Basis& basis) {
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += coeffs[mesh.triangles[elem][i]] * basis.value[i];
    return v;
}

// Gradient of a P1 field, constant on each element.
inline Vec2 eval_p1_gradient(const TriMesh& mesh, const std::vector<double>& coeffs, int elem,
                             const ElementGeometry& geom) {
    Vec2 g{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        const Vec2 gi = geom.to_physical_grad(kBaryGrad[i]);
        g[0] += coeffs[mesh.triangles[elem][i]] * gi[0];
        g[1] += coeffs[mesh.triangles[elem][i]] * gi[1];
    }
    return g;
}

// End-of-step velocity u = ustar - tau * grad(P), element by element.
struct CompositeVelocity {
    const TriMesh* mesh = nullptr;
    const DofMap* dofmap = nullptr;
    const std::vector<double>* ustar = nullptr;
    const std::vector<double>* pressure = nullptr;
    double tau = 0.0;

    Vec2 eval(int elem, const P2Basis& basis, const ElementGeometry& geom) const {
        Vec2 v = eval_p2_field(*dofmap, *ustar, elem, basis);
        const Vec2 gp = eval_p1_gradient(*mesh, *pressure, elem, geom);
        return {v[0] - tau * gp[0], v[1] - tau * gp[1]};
    }
};

// Integrates callback(elem, q, geometry) over the mesh with the given rule;
// the callback returns the integrand value at quadrature point q of element elem.
template <typename F>
inline double integrate(const TriMesh& mesh, const QuadratureRule& quad, F&& integrand) {
    double total = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        double local = 0.0;
        for (std::size_t q = 0; q < quad.points.size(); ++q)
            local += quad.weights[q] * integrand(t, static_cast<int>(q), geom);
        total += geom.det * local;
    }
    return total;
}

inline double l2_norm_p2(const TriMesh& mesh, const DofMap& dofmap, const QuadratureRule& quad,
                         const BasisTable& table, const std::vector<double>& coeffs) {
    const double s = integrate(mesh, quad, [&](int t, int q, const ElementGeometry&) {
        const Vec2 v = eval_p2_field(dofmap, coeffs, t, table.p2[q]);
        return v[0] * v[0] + v[1] * v[1];
    });
    return std::sqrt(s);
}

inline double l2_norm_div_p2(const TriMesh& mesh, const DofMap& dofmap, const QuadratureRule& quad,
                             const BasisTable& table, const std::vector<double>& coeffs) {
    const double s = integrate(mesh, quad, [&](int t, int q, const ElementGeometry& geom) {
        const auto jac = eval_p2_jacobian(dofmap, coeffs, t, table.p2[q], geom);
        const double div = jac[0][0] + jac[1][1];
        return div * div;
    });
    return std::sqrt(s);
}

inline double l2_norm_composite(const TriMesh& mesh, const QuadratureRule& quad,
                                const BasisTable& table, const CompositeVelocity& u) {
    const double s = integrate(mesh, quad, [&](int t, int q, const ElementGeometry& geom) {
        const Vec2 v = u.eval(t, table.p2[q], geom);
        return v[0] * v[0] + v[1] * v[1];
    });
    return std::sqrt(s);
}

inline double l2_norm_p1_gradient(const TriMesh& mesh, const QuadratureRule& quad,
                                  const BasisTable& table, const std::vector<double>& coeffs) {
    const double s = integrate(mesh, quad, [&](int t, int, const ElementGeometry& geom) {
        const Vec2 g = eval_p1_gradient(mesh, coeffs, t, geom);
        return g[0] * g[0] + g[1] * g[1];
    });
    return std::sqrt(s);
}

}  // namespace tpns
