#pragma once

// Two-step projection time loop with a total-pressure Dirichlet condition.
//
// Step 1 (momentum): find the tentative velocity u* with
//   [M/tau + A + N(u*_prev)] u* = (f(t_k), phi) + M u*_prev / tau - G P_prev
// under the velocity boundary constraints.
// Step 2 (pressure): solve  tau L P = -(div u*, psi)  with P = pb(t_k) on the
// straight sides, then recover u_k = u* - tau grad(P) element by element.
//
// The pressure operator is factored once per run; the momentum matrix changes
// with N(u*_prev) and is refactored every step.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tpns/assembly.hpp"
#include "tpns/errors.hpp"
#include "tpns/fem.hpp"
#include "tpns/fields.hpp"
#include "tpns/manufactured.hpp"
#include "tpns/mesh.hpp"
#include "tpns/quadrature.hpp"
#include "tpns/sparse.hpp"

namespace tpns {

struct SchemeConfig {
    double tau = 0.0;
    int n_steps = 0;
    double T = 0.0;
    double nu = 1.0;
    double rho = 1.0;
    LinearSolverKind pressure_solver = LinearSolverKind::direct;

    void validate() const {
        if (!(tau > 0.0) || n_steps <= 0 || !(T > 0.0))
            throw config_error("scheme: need tau > 0, n_steps > 0, T > 0");
        if (!(tau < 1.0)) throw config_error("scheme: the time step must satisfy tau < 1");
        if (std::abs(tau * n_steps - T) > 1e-12 * std::max(1.0, std::abs(T)))
            throw config_error("scheme: tau * n_steps must equal T (tau must divide T)");
        if (nu != 1.0 || rho != 1.0)
            throw config_error("scheme: only nu = 1 and rho = 1 are supported");
    }
};

inline SchemeConfig make_scheme_config(double tau, double T) {
    SchemeConfig cfg;
    cfg.tau = tau;
    cfg.T = T;
    cfg.n_steps = static_cast<int>(std::llround(T / tau));
    cfg.validate();
    return cfg;
}

// Data driving a run: body force and initial velocity. Boundary values
// (velocity and total pressure alike) live in the FeSystem's constraint sets,
// so a zero-boundary run needs an FeSystem built with a zero pb function.
struct ProblemData {
    std::function<Vec2(double, double, double)> f;
    std::function<Vec2(double, double)> u0;
};

inline ProblemData manufactured_data(const SectorProblem& problem) {
    return {problem.forcing_fn(), [problem](double x, double y) { return problem.initial_u0(x, y); }};
}

// Zero body force; used by the energy-decay checks.
inline ProblemData zero_data(std::function<Vec2(double, double)> u0) {
    return {[](double, double, double) { return Vec2{0.0, 0.0}; }, std::move(u0)};
}

// Mesh, DOF map, quadrature and boundary conditions bundled for one problem.
struct FeSystem {
    TriMesh mesh;
    DofMap dofmap;
    QuadratureRule quad;
    BasisTable table;
    ConstraintSet velocity_bc;
    ConstraintSet pressure_bc;

    FeSystem(TriMesh mesh_in, const std::function<double(double, double, double)>& pb)
        : mesh(std::move(mesh_in)),
          dofmap(mesh),
          quad(quadrature(6)),
          table(quad),
          velocity_bc(build_velocity_constraints(mesh, dofmap)),
          pressure_bc(build_pressure_constraints(mesh, dofmap, pb)) {}
};

struct SchemeState {
    int k = 0;
    Field ustar;     // tentative velocity u*_k
    Field pressure;  // total pressure P_k

    CompositeVelocity recovered(const FeSystem& fe, double tau) const {
        return {&fe.mesh, &fe.dofmap, &ustar.coeffs, &pressure.coeffs, tau};
    }
};

struct StepReport {
    int k = 0;
    double t = 0.0;
    double res_vel = 0.0;
    double res_press = 0.0;
    double norm_ustar = 0.0;
    double norm_u = 0.0;
    double norm_div_ustar = 0.0;
};

using StepCallback = std::function<void(const SchemeState&, const StepReport&)>;

class ProjectionScheme {
public:
    ProjectionScheme(const FeSystem& fe, ProblemData data, SchemeConfig config)
        : fe_(fe), data_(std::move(data)), config_(config) {
        config_.validate();
        mass_ = assemble_mass(fe.mesh, fe.dofmap, fe.quad);
        grad_coupling_ = assemble_grad_coupling(fe.mesh, fe.dofmap, fe.quad);
        SparseMatrix stiffness = assemble_pressure_stiffness(fe.mesh, fe.dofmap, fe.quad);
        TripletBuilder scaled;
        for (int r = 0; r < stiffness.rows(); ++r)
            for (int k = stiffness.row_ptr()[r]; k < stiffness.row_ptr()[r + 1]; ++k)
                scaled.add(r, stiffness.col_idx()[k], config_.tau * stiffness.values()[k]);
        pressure_op_.emplace(
            SparseMatrix::from_triplets(scaled, stiffness.rows(), stiffness.cols()),
            fe.pressure_bc, config_.pressure_solver);
    }

    SchemeState init_state() const {
        SchemeState state;
        state.k = 0;
        state.ustar = interpolate_p2(
            [this](double x, double y, double) { return data_.u0(x, y); }, 0.0, fe_.dofmap);
        // The interpolated field holds the boundary values only up to the
        // chord approximation of the walls; pin the constrained DOFs exactly.
        const auto values = fe_.velocity_bc.values_at(0.0);
        for (int i = 0; i < fe_.velocity_bc.size(); ++i)
            state.ustar.coeffs[fe_.velocity_bc.indices()[i]] = values[i];
        state.pressure = Field{FieldKind::PressureP1,
                               std::vector<double>(fe_.dofmap.n_pressure_dofs(), 0.0)};
        return state;
    }

    // Advances the state from k-1 to k. The state must hold u*_{k-1}, P_{k-1}.
    StepReport step(SchemeState& state) const {
        const int k = state.k + 1;
        const double t_k = k * config_.tau;

        // Step 1: momentum solve for the tentative velocity.
        std::vector<double> rhs = assemble_load(data_.f, t_k, fe_.mesh, fe_.dofmap, fe_.quad);
        {
            const std::vector<double> m_prev = mass_.spmv(state.ustar.coeffs);
            const std::vector<double> g_prev = grad_coupling_.spmv(state.pressure.coeffs);
            const double inv_tau = 1.0 / config_.tau;
            for (std::size_t i = 0; i < rhs.size(); ++i)
                rhs[i] += inv_tau * m_prev[i] - g_prev[i];
        }
        SparseMatrix system = assemble_momentum_matrix(state.ustar.coeffs);
        system = apply_constraints(system, rhs, fe_.velocity_bc, t_k);
        SolveResult vel;
        try {
            vel = lu_solve(system, rhs);
        } catch (const solver_error& err) {
            throw solver_error("scheme: velocity solve failed at step " + std::to_string(k) + ": " +
                               err.what());
        }

        state.ustar.coeffs = std::move(vel.x);

        // Step 2: pressure solve and elementwise velocity recovery.
        std::vector<double> div_rhs = assemble_div_rhs(state.ustar.coeffs, fe_.mesh, fe_.dofmap,
                                                       fe_.quad);
        SolveResult press;
        try {
            press = pressure_op_->solve(std::move(div_rhs), fe_.pressure_bc.values_at(t_k));
        } catch (const solver_error& err) {
            throw solver_error("scheme: pressure solve failed at step " + std::to_string(k) + ": " +
                               err.what());
        }
        state.pressure.coeffs = std::move(press.x);
        state.k = k;

        StepReport report;
        report.k = k;
        report.t = t_k;
        report.res_vel = vel.rel_residual;
        report.res_press = press.rel_residual;
        report.norm_ustar = l2_norm_p2(fe_.mesh, fe_.dofmap, fe_.quad, fe_.table, state.ustar.coeffs);
        report.norm_u = l2_norm_composite(fe_.mesh, fe_.quad, fe_.table,
                                          state.recovered(fe_, config_.tau));
        report.norm_div_ustar =
            l2_norm_div_p2(fe_.mesh, fe_.dofmap, fe_.quad, fe_.table, state.ustar.coeffs);
        return report;
    }

    // Runs k = 1..N from the interpolated initial state.
    std::vector<StepReport> run(const StepCallback& callback = nullptr) const {
        SchemeState state = init_state();
        std::vector<StepReport> reports;
        reports.reserve(config_.n_steps);
        for (int k = 1; k <= config_.n_steps; ++k) {
            reports.push_back(step(state));
            if (callback) callback(state, reports.back());
        }
        return reports;
    }

    const SchemeConfig& config() const { return config_; }
    const SparseMatrix& mass_matrix() const { return mass_; }
    const SparseMatrix& grad_coupling_matrix() const { return grad_coupling_; }

    // M/tau + A + N(w) assembled in a single element loop.
    SparseMatrix assemble_momentum_matrix(const std::vector<double>& w) const {
        const double inv_tau = 1.0 / config_.tau;
        const TriMesh& mesh = fe_.mesh;
        const DofMap& dofmap = fe_.dofmap;
        const QuadratureRule& quad = fe_.quad;
        const BasisTable& table = fe_.table;
        TripletBuilder trips;
        trips.reserve(mesh.triangles.size() * 144);
        for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
            const ElementGeometry geom = element_geometry(mesh, t);
            const auto& nodes = dofmap.cell_nodes(t);
            double local[12][12] = {};
            for (std::size_t q = 0; q < quad.points.size(); ++q) {
                const double wq = geom.det * quad.weights[q];
                const auto& val = table.p2[q].value;
                double div[12], curl[12];
                for (int n = 0; n < 6; ++n) {
                    const Vec2 g = geom.to_physical_grad(table.p2[q].grad[n]);
                    div[n] = g[0];
                    curl[n] = -g[1];
                    div[6 + n] = g[1];
                    curl[6 + n] = g[0];
                }
                const auto jac = eval_p2_jacobian(dofmap, w, t, table.p2[q], geom);
                const double curl_w = jac[1][0] - jac[0][1];
                for (int n = 0; n < 6; ++n) {
                    for (int m = 0; m < 6; ++m) {
                        const double mass_nm = inv_tau * wq * val[n] * val[m];
                        const double conv_nm = wq * curl_w * val[m] * val[n];
                        local[n][m] += mass_nm;
                        local[6 + n][6 + m] += mass_nm;
                        // trial x against test y: +curl pairing; mirrored with
                        // the exact negation to keep N skew-symmetric bitwise
                        local[6 + n][m] += conv_nm;
                        local[n][6 + m] -= conv_nm;
                    }
                }
                for (int a = 0; a < 12; ++a)
                    for (int b = 0; b < 12; ++b)
                        local[a][b] += wq * (div[a] * div[b] + curl[a] * curl[b]);
            }
            for (int a = 0; a < 12; ++a)
                for (int b = 0; b < 12; ++b)
                    trips.add(dofmap.velocity_dof(nodes[a % 6], a / 6),
                              dofmap.velocity_dof(nodes[b % 6], b / 6), local[a][b]);
        }
        return SparseMatrix::from_triplets(trips, dofmap.n_velocity_dofs(),
                                           dofmap.n_velocity_dofs());
    }

private:
    const FeSystem& fe_;
    ProblemData data_;
    SchemeConfig config_;
    SparseMatrix mass_;
    SparseMatrix grad_coupling_;
    std::optional<ConstrainedOperator> pressure_op_;
};

}  // namespace tpns
