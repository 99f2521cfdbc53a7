#pragma once

// P1/P2 Lagrange elements on triangles: reference bases, affine element
// geometry, global DOF enumeration and Dirichlet constraint sets.
//
// Velocity is vector P2 with component-blocked DOFs: x-components occupy
// [0, n_p2_nodes), y-components [n_p2_nodes, 2*n_p2_nodes). Pressure is P1
// with one DOF per mesh vertex.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "tpns/errors.hpp"
#include "tpns/mesh.hpp"
#include "tpns/quadrature.hpp"

namespace tpns {

using Vec2 = std::array<double, 2>;

// Reference triangle: barycentric (l0, l1, l2) with l0 = 1-x-y, l1 = x, l2 = y.
// Reference gradients are with respect to (x, y) on that triangle.
inline constexpr std::array<Vec2, 3> kBaryGrad = {{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};

struct P1Basis {
    std::array<double, 3> value;
    std::array<Vec2, 3> grad;  // constant, kept per-point for uniformity
};

inline P1Basis eval_p1_basis(const std::array<double, 3>& b) {
    return {{b[0], b[1], b[2]}, kBaryGrad};
}

// P2 node order: three vertices, then midpoints of edges (0,1), (1,2), (2,0).
struct P2Basis {
    std::array<double, 6> value;
    std::array<Vec2, 6> grad;
};

inline P2Basis eval_p2_basis(const std::array<double, 3>& b) {
    P2Basis out;
    for (int i = 0; i < 3; ++i) {
        out.value[i] = b[i] * (2.0 * b[i] - 1.0);
        out.grad[i] = {(4.0 * b[i] - 1.0) * kBaryGrad[i][0], (4.0 * b[i] - 1.0) * kBaryGrad[i][1]};
    }
    constexpr int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
    for (int e = 0; e < 3; ++e) {
        const int i = ea[e], j = eb[e];
        out.value[3 + e] = 4.0 * b[i] * b[j];
        out.grad[3 + e] = {4.0 * (b[j] * kBaryGrad[i][0] + b[i] * kBaryGrad[j][0]),
                           4.0 * (b[j] * kBaryGrad[i][1] + b[i] * kBaryGrad[j][1])};
    }
    return out;
}

// Affine map from the reference triangle to a mesh triangle.
struct ElementGeometry {
    Point2 p0;
    double jac[2][2];      // columns are the edge vectors p1-p0, p2-p0
    double inv_jac_t[2][2];  // transforms reference gradients to physical ones
    double det = 0.0;      // = 2 * area, positive for counterclockwise triangles
    double area = 0.0;

    Point2 map(const std::array<double, 3>& b) const {
        return {p0.x + jac[0][0] * b[1] + jac[0][1] * b[2],
                p0.y + jac[1][0] * b[1] + jac[1][1] * b[2]};
    }
    Vec2 to_physical_grad(const Vec2& ref_grad) const {
        return {inv_jac_t[0][0] * ref_grad[0] + inv_jac_t[0][1] * ref_grad[1],
                inv_jac_t[1][0] * ref_grad[0] + inv_jac_t[1][1] * ref_grad[1]};
    }
};

inline ElementGeometry element_geometry(const TriMesh& mesh, int t) {
    const Point2& a = mesh.vertices[mesh.triangles[t][0]];
    const Point2& b = mesh.vertices[mesh.triangles[t][1]];
    const Point2& c = mesh.vertices[mesh.triangles[t][2]];
    ElementGeometry g;
    g.p0 = a;
    g.jac[0][0] = b.x - a.x;
    g.jac[0][1] = c.x - a.x;
    g.jac[1][0] = b.y - a.y;
    g.jac[1][1] = c.y - a.y;
    g.det = g.jac[0][0] * g.jac[1][1] - g.jac[0][1] * g.jac[1][0];
    g.area = 0.5 * g.det;
    const double inv_det = 1.0 / g.det;
    g.inv_jac_t[0][0] = g.jac[1][1] * inv_det;
    g.inv_jac_t[0][1] = -g.jac[1][0] * inv_det;
    g.inv_jac_t[1][0] = -g.jac[0][1] * inv_det;
    g.inv_jac_t[1][1] = g.jac[0][0] * inv_det;
    return g;
}

// Global numbering: P2 nodes are mesh vertices first, then one node per
// unique edge (keyed by the sorted endpoint pair, numbered in key order).
class DofMap {
public:
    explicit DofMap(const TriMesh& mesh) : n_vertices_(static_cast<int>(mesh.vertices.size())) {
        std::map<std::pair<int, int>, int> edge_ids;
        auto edge_id = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = edge_ids.find(key);
            if (it == edge_ids.end()) it = edge_ids.emplace(key, static_cast<int>(edge_ids.size())).first;
            return it->second;
        };
        cell_nodes_.reserve(mesh.triangles.size());
        for (const auto& t : mesh.triangles) {
            std::array<int, 6> nodes;
            for (int v = 0; v < 3; ++v) nodes[v] = t[v];
            nodes[3] = edge_id(t[0], t[1]);
            nodes[4] = edge_id(t[1], t[2]);
            nodes[5] = edge_id(t[2], t[0]);
            cell_nodes_.push_back(nodes);
        }
        n_edges_ = static_cast<int>(edge_ids.size());
        for (auto& nodes : cell_nodes_)
            for (int e = 3; e < 6; ++e) nodes[e] += n_vertices_;

        node_coords_.resize(n_vertices_ + n_edges_);
        for (int v = 0; v < n_vertices_; ++v) node_coords_[v] = mesh.vertices[v];
        for (const auto& [key, id] : edge_ids) {
            const Point2& a = mesh.vertices[key.first];
            const Point2& b = mesh.vertices[key.second];
            node_coords_[n_vertices_ + id] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        }
        edge_node_of_pair_ = std::move(edge_ids);
    }

    int n_vertices() const { return n_vertices_; }
    int n_edges() const { return n_edges_; }
    int n_p2_nodes() const { return n_vertices_ + n_edges_; }
    int n_velocity_dofs() const { return 2 * n_p2_nodes(); }
    int n_pressure_dofs() const { return n_vertices_; }

    // Velocity DOF of a P2 node: component 0 = x block, component 1 = y block.
    int velocity_dof(int node, int component) const { return component * n_p2_nodes() + node; }

    const std::array<int, 6>& cell_nodes(int t) const { return cell_nodes_[t]; }
    const Point2& node_coord(int node) const { return node_coords_[node]; }

    // P2 node sitting on the midpoint of edge (a, b), if that edge exists.
    int edge_node(int a, int b) const {
        auto it = edge_node_of_pair_.find(std::minmax(a, b));
        if (it == edge_node_of_pair_.end())
            throw std::out_of_range("fem: no edge between requested vertices");
        return n_vertices_ + it->second;
    }

private:
    int n_vertices_;
    int n_edges_ = 0;
    std::vector<std::array<int, 6>> cell_nodes_;
    std::vector<Point2> node_coords_;
    std::map<std::pair<int, int>, int> edge_node_of_pair_;
};

inline DofMap build_dof_map(const TriMesh& mesh) { return DofMap(mesh); }

enum class FieldKind { VelocityP2, PressureP1 };

struct Field {
    FieldKind kind = FieldKind::VelocityP2;
    std::vector<double> coeffs;
};

inline Field interpolate_p2(const std::function<Vec2(double, double, double)>& fn, double t,
                            const DofMap& dofmap) {
    Field out{FieldKind::VelocityP2, std::vector<double>(dofmap.n_velocity_dofs(), 0.0)};
    for (int n = 0; n < dofmap.n_p2_nodes(); ++n) {
        const Point2& p = dofmap.node_coord(n);
        const Vec2 v = fn(p.x, p.y, t);
        out.coeffs[dofmap.velocity_dof(n, 0)] = v[0];
        out.coeffs[dofmap.velocity_dof(n, 1)] = v[1];
    }
    return out;
}

inline Field interpolate_p1(const std::function<double(double, double, double)>& fn, double t,
                            const DofMap& dofmap) {
    Field out{FieldKind::PressureP1, std::vector<double>(dofmap.n_pressure_dofs(), 0.0)};
    for (int v = 0; v < dofmap.n_pressure_dofs(); ++v) {
        const Point2& p = dofmap.node_coord(v);
        out.coeffs[v] = fn(p.x, p.y, t);
    }
    return out;
}

// Dirichlet constraints: DOF indices with time-dependent prescribed values.
// The structure is built once; values are re-evaluated per time step.
class ConstraintSet {
public:
    void add(int dof, std::function<double(double)> value) {
        indices_.push_back(dof);
        values_.push_back(std::move(value));
    }

    int size() const { return static_cast<int>(indices_.size()); }
    const std::vector<int>& indices() const { return indices_; }

    std::vector<double> values_at(double t) const {
        std::vector<double> out(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i](t);
        return out;
    }

    void sort_by_index() {
        std::vector<int> order(indices_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return indices_[a] < indices_[b]; });
        std::vector<int> idx(indices_.size());
        std::vector<std::function<double(double)>> val(values_.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            idx[i] = indices_[order[i]];
            val[i] = std::move(values_[order[i]]);
        }
        indices_ = std::move(idx);
        values_ = std::move(val);
    }

private:
    std::vector<int> indices_;
    std::vector<std::function<double(double)>> values_;
};

namespace detail {

// Per-node boundary membership for the velocity space. A boundary edge
// contributes its two endpoints and its midpoint node.
struct BoundaryNodeSets {
    std::vector<char> on_gamma1;
    std::vector<char> on_gamma2_theta_min;
    std::vector<char> on_gamma2_theta_max;
};

inline BoundaryNodeSets classify_boundary_nodes(const TriMesh& mesh, const DofMap& dofmap) {
    BoundaryNodeSets s;
    const int n = dofmap.n_p2_nodes();
    s.on_gamma1.assign(n, 0);
    s.on_gamma2_theta_min.assign(n, 0);
    s.on_gamma2_theta_max.assign(n, 0);
    for (const BoundaryEdge& e : mesh.boundary_edges) {
        std::vector<char>* set = nullptr;
        switch (e.tag) {
            case BoundaryTag::Gamma1: set = &s.on_gamma1; break;
            case BoundaryTag::Gamma2ThetaMin: set = &s.on_gamma2_theta_min; break;
            case BoundaryTag::Gamma2ThetaMax: set = &s.on_gamma2_theta_max; break;
        }
        (*set)[e.a] = 1;
        (*set)[e.b] = 1;
        (*set)[dofmap.edge_node(e.a, e.b)] = 1;
    }
    return s;
}

}  // namespace detail

// Velocity boundary conditions: u = 0 on the closure of the circular walls;
// on the straight sides only the tangential component is constrained to zero
// (on y = 0 the tangent is (1,0) and the cross product u x n = -u_x; on x = 0
// it is u_y). Corner nodes inherit the full wall constraint.
inline ConstraintSet build_velocity_constraints(const TriMesh& mesh, const DofMap& dofmap) {
    for (const BoundaryEdge& e : mesh.boundary_edges) {
        if (e.tag == BoundaryTag::Gamma2ThetaMin &&
            (mesh.vertices[e.a].y != 0.0 || mesh.vertices[e.b].y != 0.0))
            throw config_error("fem: unsupported geometry, theta-min side not on y = 0");
        if (e.tag == BoundaryTag::Gamma2ThetaMax &&
            (mesh.vertices[e.a].x != 0.0 || mesh.vertices[e.b].x != 0.0))
            throw config_error("fem: unsupported geometry, theta-max side not on x = 0");
    }
    const auto sets = detail::classify_boundary_nodes(mesh, dofmap);
    auto zero = [](double) { return 0.0; };
    ConstraintSet out;
    for (int n = 0; n < dofmap.n_p2_nodes(); ++n) {
        if (sets.on_gamma1[n]) {
            out.add(dofmap.velocity_dof(n, 0), zero);
            out.add(dofmap.velocity_dof(n, 1), zero);
        } else if (sets.on_gamma2_theta_min[n]) {
            out.add(dofmap.velocity_dof(n, 0), zero);
        } else if (sets.on_gamma2_theta_max[n]) {
            out.add(dofmap.velocity_dof(n, 1), zero);
        }
    }
    out.sort_by_index();
    return out;
}

// Pressure boundary condition: nodal values of pb on every vertex touching
// the straight sides, including the corners. Wall vertices stay natural.
inline ConstraintSet build_pressure_constraints(
    const TriMesh& mesh, const DofMap& dofmap,
    const std::function<double(double, double, double)>& pb) {
    std::vector<char> on_gamma2(dofmap.n_vertices(), 0);
    for (const BoundaryEdge& e : mesh.boundary_edges) {
        if (e.tag == BoundaryTag::Gamma1) continue;
        on_gamma2[e.a] = 1;
        on_gamma2[e.b] = 1;
    }
    ConstraintSet out;
    for (int v = 0; v < dofmap.n_vertices(); ++v) {
        if (!on_gamma2[v]) continue;
        const Point2 p = mesh.vertices[v];
        out.add(v, [pb, p](double t) { return pb(p.x, p.y, t); });
    }
    out.sort_by_index();
    return out;
}

}  // namespace tpns
