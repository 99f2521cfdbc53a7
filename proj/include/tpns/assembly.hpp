#pragma once

// Assembly of the discrete operators:
//   M     velocity mass (u, v), block-diagonal over components
//   A     div-div + curl-curl form a(u, v)
//   N(w)  rotation-form convection, entries  integral of (curl w)(v x phi);
//         assembled so that skew-symmetry holds exactly in floating point
//   L     pressure stiffness (grad P, grad psi)
//   G     gradient coupling (grad P, phi), velocity rows x pressure columns
// plus load/divergence right-hand sides and Dirichlet constraint application.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tpns/fem.hpp"
#include "tpns/fields.hpp"
#include "tpns/mesh.hpp"
#include "tpns/quadrature.hpp"
#include "tpns/sparse.hpp"

namespace tpns {

inline SparseMatrix assemble_mass(const TriMesh& mesh, const DofMap& dofmap,
                                  const QuadratureRule& quad) {
    const BasisTable table(quad);
    TripletBuilder trips;
    trips.reserve(mesh.triangles.size() * 72);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        const auto& nodes = dofmap.cell_nodes(t);
        double local[6][6] = {};
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const double w = geom.det * quad.weights[q];
            const auto& val = table.p2[q].value;
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) local[i][j] += w * val[i] * val[j];
        }
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                for (int c = 0; c < 2; ++c)
                    trips.add(dofmap.velocity_dof(nodes[i], c), dofmap.velocity_dof(nodes[j], c),
                              local[i][j]);
    }
    return SparseMatrix::from_triplets(trips, dofmap.n_velocity_dofs(), dofmap.n_velocity_dofs());
}

inline SparseMatrix assemble_a(const TriMesh& mesh, const DofMap& dofmap,
                               const QuadratureRule& quad) {
    const BasisTable table(quad);
    TripletBuilder trips;
    trips.reserve(mesh.triangles.size() * 144);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        const auto& nodes = dofmap.cell_nodes(t);
        double local[12][12] = {};
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const double w = geom.det * quad.weights[q];
            // Local velocity DOF a: node a%6, component a/6.
            // div  of the x-basis is d/dx, of the y-basis d/dy;
            // curl of the x-basis is -d/dy, of the y-basis  d/dx.
            double div[12], curl[12];
            for (int n = 0; n < 6; ++n) {
                const Vec2 g = geom.to_physical_grad(table.p2[q].grad[n]);
                div[n] = g[0];
                curl[n] = -g[1];
                div[6 + n] = g[1];
                curl[6 + n] = g[0];
            }
            for (int a = 0; a < 12; ++a)
                for (int b = 0; b < 12; ++b)
                    local[a][b] += w * (div[a] * div[b] + curl[a] * curl[b]);
        }
        for (int a = 0; a < 12; ++a)
            for (int b = 0; b < 12; ++b)
                trips.add(dofmap.velocity_dof(nodes[a % 6], a / 6),
                          dofmap.velocity_dof(nodes[b % 6], b / 6), local[a][b]);
    }
    return SparseMatrix::from_triplets(trips, dofmap.n_velocity_dofs(), dofmap.n_velocity_dofs());
}

// Convection in rotation form. In 2D, (curl w) is scalar and the form reads
// integral of (curl w)(v x phi) with v x phi = v_x phi_y - v_y phi_x, so only
// cross-component blocks are nonzero. Each (test node n, trial node m) value
// is computed once and inserted with both signs, making N(w) skew-symmetric
// down to the last bit.
inline SparseMatrix assemble_convection(const std::vector<double>& w, const TriMesh& mesh,
                                        const DofMap& dofmap, const QuadratureRule& quad) {
    const BasisTable table(quad);
    TripletBuilder trips;
    trips.reserve(mesh.triangles.size() * 72);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        const auto& nodes = dofmap.cell_nodes(t);
        double local[6][6] = {};  // local[n][m] = integral of curl(w) * phi_m * phi_n
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const double wq = geom.det * quad.weights[q];
            const auto jac = eval_p2_jacobian(dofmap, w, t, table.p2[q], geom);
            const double curl_w = jac[1][0] - jac[0][1];
            const auto& val = table.p2[q].value;
            for (int n = 0; n < 6; ++n)
                for (int m = 0; m < 6; ++m) local[n][m] += wq * curl_w * val[m] * val[n];
        }
        for (int n = 0; n < 6; ++n) {
            for (int m = 0; m < 6; ++m) {
                // trial x against test y: +, trial y against test x: -
                trips.add(dofmap.velocity_dof(nodes[n], 1), dofmap.velocity_dof(nodes[m], 0),
                          local[n][m]);
                trips.add(dofmap.velocity_dof(nodes[n], 0), dofmap.velocity_dof(nodes[m], 1),
                          -local[n][m]);
            }
        }
    }
    return SparseMatrix::from_triplets(trips, dofmap.n_velocity_dofs(), dofmap.n_velocity_dofs());
}

// Largest |curl w| over all quadrature points; scales skew-symmetry checks.
inline double max_abs_curl(const std::vector<double>& w, const TriMesh& mesh, const DofMap& dofmap,
                           const QuadratureRule& quad) {
    const BasisTable table(quad);
    double m = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const auto jac = eval_p2_jacobian(dofmap, w, t, table.p2[q], geom);
            m = std::max(m, std::abs(jac[1][0] - jac[0][1]));
        }
    }
    return m;
}

inline SparseMatrix assemble_pressure_stiffness(const TriMesh& mesh, const DofMap& dofmap,
                                                const QuadratureRule& quad) {
    TripletBuilder trips;
    trips.reserve(mesh.triangles.size() * 9);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        Vec2 g[3];
        for (int i = 0; i < 3; ++i) g[i] = geom.to_physical_grad(kBaryGrad[i]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trips.add(mesh.triangles[t][i], mesh.triangles[t][j],
                          geom.area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]));
    }
    (void)quad;  // P1 gradients are element-constant; the exact value needs no rule
    return SparseMatrix::from_triplets(trips, dofmap.n_pressure_dofs(), dofmap.n_pressure_dofs());
}

inline SparseMatrix assemble_grad_coupling(const TriMesh& mesh, const DofMap& dofmap,
                                           const QuadratureRule& quad) {
    const BasisTable table(quad);
    TripletBuilder trips;
    trips.reserve(mesh.triangles.size() * 36);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        const auto& nodes = dofmap.cell_nodes(t);
        Vec2 gpsi[3];
        for (int j = 0; j < 3; ++j) gpsi[j] = geom.to_physical_grad(kBaryGrad[j]);
        double phi_integral[6] = {};  // integral of each scalar P2 basis over the element
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const double w = geom.det * quad.weights[q];
            for (int n = 0; n < 6; ++n) phi_integral[n] += w * table.p2[q].value[n];
        }
        for (int n = 0; n < 6; ++n) {
            for (int j = 0; j < 3; ++j) {
                trips.add(dofmap.velocity_dof(nodes[n], 0), mesh.triangles[t][j],
                          phi_integral[n] * gpsi[j][0]);
                trips.add(dofmap.velocity_dof(nodes[n], 1), mesh.triangles[t][j],
                          phi_integral[n] * gpsi[j][1]);
            }
        }
    }
    return SparseMatrix::from_triplets(trips, dofmap.n_velocity_dofs(), dofmap.n_pressure_dofs());
}

// Right-hand side of the pressure step: entry i = -integral of div(ustar) psi_i.
inline std::vector<double> assemble_div_rhs(const std::vector<double>& ustar, const TriMesh& mesh,
                                            const DofMap& dofmap, const QuadratureRule& quad) {
    const BasisTable table(quad);
    std::vector<double> rhs(dofmap.n_pressure_dofs(), 0.0);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const double w = geom.det * quad.weights[q];
            const auto jac = eval_p2_jacobian(dofmap, ustar, t, table.p2[q], geom);
            const double div = jac[0][0] + jac[1][1];
            for (int j = 0; j < 3; ++j)
                rhs[mesh.triangles[t][j]] -= w * div * table.p1[q].value[j];
        }
    }
    return rhs;
}

// Load vector (f(t), phi) with f evaluated analytically at quadrature points.
inline std::vector<double> assemble_load(const std::function<Vec2(double, double, double)>& f,
                                         double t_eval, const TriMesh& mesh, const DofMap& dofmap,
                                         const QuadratureRule& quad) {
    const BasisTable table(quad);
    std::vector<double> rhs(dofmap.n_velocity_dofs(), 0.0);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        const auto& nodes = dofmap.cell_nodes(t);
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const double w = geom.det * quad.weights[q];
            const Point2 x = geom.map(quad.points[q]);
            const Vec2 fx = f(x.x, x.y, t_eval);
            for (int n = 0; n < 6; ++n) {
                rhs[dofmap.velocity_dof(nodes[n], 0)] += w * fx[0] * table.p2[q].value[n];
                rhs[dofmap.velocity_dof(nodes[n], 1)] += w * fx[1] * table.p2[q].value[n];
            }
        }
    }
    return rhs;
}

// Mass pairing of a composite velocity with the vector P2 test functions:
// entry i = integral of u . phi_i. Used by the formulation cross-check that
// rebuilds the time term from the recovered end-of-step velocity.
inline std::vector<double> assemble_composite_mass_rhs(const CompositeVelocity& u,
                                                       const TriMesh& mesh, const DofMap& dofmap,
                                                       const QuadratureRule& quad) {
    const BasisTable table(quad);
    std::vector<double> rhs(dofmap.n_velocity_dofs(), 0.0);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        const auto& nodes = dofmap.cell_nodes(t);
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const double w = geom.det * quad.weights[q];
            const Vec2 v = u.eval(t, table.p2[q], geom);
            for (int n = 0; n < 6; ++n) {
                rhs[dofmap.velocity_dof(nodes[n], 0)] += w * v[0] * table.p2[q].value[n];
                rhs[dofmap.velocity_dof(nodes[n], 1)] += w * v[1] * table.p2[q].value[n];
            }
        }
    }
    return rhs;
}

// Pairings (u, grad psi_j) for every pressure basis function psi_j; the
// projection property says these vanish on the unconstrained pressure DOFs.
inline std::vector<double> pair_with_pressure_gradients(const CompositeVelocity& u,
                                                        const TriMesh& mesh, const DofMap& dofmap,
                                                        const QuadratureRule& quad) {
    const BasisTable table(quad);
    std::vector<double> out(dofmap.n_pressure_dofs(), 0.0);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const ElementGeometry geom = element_geometry(mesh, t);
        Vec2 gpsi[3];
        for (int j = 0; j < 3; ++j) gpsi[j] = geom.to_physical_grad(kBaryGrad[j]);
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const double w = geom.det * quad.weights[q];
            const Vec2 v = u.eval(t, table.p2[q], geom);
            for (int j = 0; j < 3; ++j)
                out[mesh.triangles[t][j]] += w * (v[0] * gpsi[j][0] + v[1] * gpsi[j][1]);
        }
    }
    return out;
}

// Dirichlet elimination: constrained rows become identity rows with the
// prescribed value on the right-hand side, and constrained columns are moved
// to the right-hand side of the remaining rows. Symmetric inputs stay
// symmetric; nonsymmetric inputs get plain row replacement plus the column
// transfer, which yields the same solution.
inline SparseMatrix apply_constraints(const SparseMatrix& m, std::vector<double>& rhs,
                                      const std::vector<int>& indices,
                                      const std::vector<double>& values) {
    std::vector<char> constrained(m.rows(), 0);
    std::vector<double> value_of(m.rows(), 0.0);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const int dof = indices[i];
        if (dof < 0 || dof >= m.rows())
            throw std::out_of_range("assembly: constraint index " + std::to_string(dof) +
                                    " outside system of size " + std::to_string(m.rows()));
        constrained[dof] = 1;
        value_of[dof] = values[i];
    }
    TripletBuilder trips;
    trips.reserve(m.nnz());
    for (int r = 0; r < m.rows(); ++r) {
        if (constrained[r]) {
            trips.add(r, r, 1.0);
            rhs[r] = value_of[r];
            continue;
        }
        for (int k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
            const int c = m.col_idx()[k];
            if (constrained[c])
                rhs[r] -= m.values()[k] * value_of[c];
            else
                trips.add(r, c, m.values()[k]);
        }
    }
    return SparseMatrix::from_triplets(trips, m.rows(), m.cols());
}

inline SparseMatrix apply_constraints(const SparseMatrix& m, std::vector<double>& rhs,
                                      const ConstraintSet& constraints, double t) {
    return apply_constraints(m, rhs, constraints.indices(), constraints.values_at(t));
}

// A constrained operator factored once and solved many times with fresh
// boundary values: keeps the unconstrained matrix for the column transfer.
enum class LinearSolverKind { direct, cg };

class ConstrainedOperator {
public:
    ConstrainedOperator(SparseMatrix raw, const ConstraintSet& constraints,
                        LinearSolverKind kind = LinearSolverKind::direct)
        : raw_(std::move(raw)), indices_(constraints.indices()), kind_(kind) {
        std::vector<double> probe_rhs(raw_.rows(), 0.0);
        std::vector<double> zeros(indices_.size(), 0.0);
        constrained_ = apply_constraints(raw_, probe_rhs, indices_, zeros);
        if (kind_ == LinearSolverKind::direct) lu_.emplace(constrained_);
    }

    // Solves with the given raw right-hand side and constraint values.
    SolveResult solve(std::vector<double> rhs, const std::vector<double>& values) const {
        std::vector<char> constrained(raw_.rows(), 0);
        std::vector<double> value_of(raw_.rows(), 0.0);
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            constrained[indices_[i]] = 1;
            value_of[indices_[i]] = values[i];
        }
        for (int r = 0; r < raw_.rows(); ++r) {
            if (constrained[r]) {
                rhs[r] = value_of[r];
                continue;
            }
            for (int k = raw_.row_ptr()[r]; k < raw_.row_ptr()[r + 1]; ++k) {
                const int c = raw_.col_idx()[k];
                if (constrained[c]) rhs[r] -= raw_.values()[k] * value_of[c];
            }
        }
        if (kind_ == LinearSolverKind::direct) return lu_->solve(rhs);
        return cg_solve(constrained_, rhs, 1e-12, 20 * raw_.rows());
    }

    const SparseMatrix& constrained_matrix() const { return constrained_; }
    const SparseMatrix& raw_matrix() const { return raw_; }

private:
    SparseMatrix raw_;
    std::vector<int> indices_;
    LinearSolverKind kind_;
    SparseMatrix constrained_;
    std::optional<LuSolver> lu_;
};

}  // namespace tpns
