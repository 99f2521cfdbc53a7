#pragma once

// Verification instruments: error norms against nodal interpolants of the
// exact solution, time-accumulated study norms, log-log slope fitting,
// finite-difference oracles for the manufactured fields, and a property
// suite (quadrature exactness, skew-symmetry, energy decay, orthogonality).

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tpns/assembly.hpp"
#include "tpns/errors.hpp"
#include "tpns/fem.hpp"
#include "tpns/fields.hpp"
#include "tpns/manufactured.hpp"
#include "tpns/mesh.hpp"
#include "tpns/scheme.hpp"
#include "tpns/sparse.hpp"

namespace tpns {

// || numeric - interpolant of exact at time t ||_L2 for a P2 coefficient field.
inline double field_error_l2(const FeSystem& fe, const std::vector<double>& p2_coeffs,
                             const std::function<Vec2(double, double, double)>& exact, double t) {
    const Field interp = interpolate_p2(exact, t, fe.dofmap);
    const double s = integrate(fe.mesh, fe.quad, [&](int e, int q, const ElementGeometry&) {
        const Vec2 a = eval_p2_field(fe.dofmap, p2_coeffs, e, fe.table.p2[q]);
        const Vec2 b = eval_p2_field(fe.dofmap, interp.coeffs, e, fe.table.p2[q]);
        const double dx = a[0] - b[0], dy = a[1] - b[1];
        return dx * dx + dy * dy;
    });
    return std::sqrt(s);
}

// Same, for the composite end-of-step velocity (evaluated directly, never
// re-interpolated into the P2 space).
inline double field_error_l2(const FeSystem& fe, const CompositeVelocity& u,
                             const std::function<Vec2(double, double, double)>& exact, double t) {
    const Field interp = interpolate_p2(exact, t, fe.dofmap);
    const double s = integrate(fe.mesh, fe.quad, [&](int e, int q, const ElementGeometry& geom) {
        const Vec2 a = u.eval(e, fe.table.p2[q], geom);
        const Vec2 b = eval_p2_field(fe.dofmap, interp.coeffs, e, fe.table.p2[q]);
        const double dx = a[0] - b[0], dy = a[1] - b[1];
        return dx * dx + dy * dy;
    });
    return std::sqrt(s);
}

// || numeric - interpolant ||_L2 for the P1 pressure.
inline double field_error_l2_pressure(const FeSystem& fe, const std::vector<double>& p1_coeffs,
                                      const std::function<double(double, double, double)>& exact,
                                      double t) {
    const Field interp = interpolate_p1(exact, t, fe.dofmap);
    const double s = integrate(fe.mesh, fe.quad, [&](int e, int q, const ElementGeometry&) {
        const double d = eval_p1_field(fe.mesh, p1_coeffs, e, fe.table.p1[q]) -
                         eval_p1_field(fe.mesh, interp.coeffs, e, fe.table.p1[q]);
        return d * d;
    });
    return std::sqrt(s);
}

// Full H1 norm (L2 part plus gradient seminorm) of a P2 field minus the
// interpolant of the exact field.
inline double field_error_h1(const FeSystem& fe, const std::vector<double>& p2_coeffs,
                             const std::function<Vec2(double, double, double)>& exact, double t) {
    const Field interp = interpolate_p2(exact, t, fe.dofmap);
    std::vector<double> diff(p2_coeffs.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = p2_coeffs[i] - interp.coeffs[i];
    const double s = integrate(fe.mesh, fe.quad, [&](int e, int q, const ElementGeometry& geom) {
        const Vec2 v = eval_p2_field(fe.dofmap, diff, e, fe.table.p2[q]);
        const auto jac = eval_p2_jacobian(fe.dofmap, diff, e, fe.table.p2[q], geom);
        return v[0] * v[0] + v[1] * v[1] + jac[0][0] * jac[0][0] + jac[0][1] * jac[0][1] +
               jac[1][0] * jac[1][0] + jac[1][1] * jac[1][1];
    });
    return std::sqrt(s);
}

// L2(H1)-style step norm built from the same bilinear form the momentum step
// uses: L2 part plus the div/curl gradient seminorm a(e, e).
inline double field_error_h1_aform(const FeSystem& fe, const std::vector<double>& p2_coeffs,
                                   const std::function<Vec2(double, double, double)>& exact,
                                   double t) {
    const Field interp = interpolate_p2(exact, t, fe.dofmap);
    std::vector<double> diff(p2_coeffs.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = p2_coeffs[i] - interp.coeffs[i];
    const double s = integrate(fe.mesh, fe.quad, [&](int e, int q, const ElementGeometry& geom) {
        const Vec2 v = eval_p2_field(fe.dofmap, diff, e, fe.table.p2[q]);
        const auto jac = eval_p2_jacobian(fe.dofmap, diff, e, fe.table.p2[q], geom);
        const double div = jac[0][0] + jac[1][1];
        const double curl = jac[1][0] - jac[0][1];
        return v[0] * v[0] + v[1] * v[1] + div * div + curl * curl;
    });
    return std::sqrt(s);
}

// || u_k - u*_k ||_L2 evaluated honestly on the composite representation.
inline double l2_norm_recovery_gap(const FeSystem& fe, const SchemeState& state, double tau) {
    const CompositeVelocity u = state.recovered(fe, tau);
    const double s = integrate(fe.mesh, fe.quad, [&](int e, int q, const ElementGeometry& geom) {
        const Vec2 a = u.eval(e, fe.table.p2[q], geom);
        const Vec2 b = eval_p2_field(fe.dofmap, state.ustar.coeffs, e, fe.table.p2[q]);
        const double dx = a[0] - b[0], dy = a[1] - b[1];
        return dx * dx + dy * dy;
    });
    return std::sqrt(s);
}

// Running sums of tau * ||e_k||^2 for the five tracked error quantities; the
// reported space-time norms are square roots of the sums (piecewise-constant
// interpolation in time over (t_{k-1}, t_k]).
class ErrorAccumulator {
public:
    ErrorAccumulator(const FeSystem& fe, const SectorProblem& problem, double tau)
        : fe_(&fe), problem_(&problem), tau_(tau) {}

    void add(const SchemeState& state, const StepReport& report) { accumulate_at(state, report.t); }

    // Contribution of the starting state (tentative velocity = pinned nodal
    // interpolant of the initial data, total pressure = 0) at the left endpoint
    // of the first slab. The velocity-type terms reduce to the tiny residue of
    // pinning wall nodes to zero where the chord midpoints sit slightly inside
    // the circular walls; the pressure term carries the full ||P(0)|| startup
    // error that the time-stepping then works off, and the reported space-time
    // pressure norm owes its sqrt(tau) decay to exactly this term.
    void seed_initial(const SchemeState& state) { accumulate_at(state, 0.0); }

    struct Errors {
        double u = 0.0;        // || u - interpolant ||_{L2(L2)}
        double ustar = 0.0;    // tentative velocity, same norm
        double P = 0.0;        // total pressure, L2(L2)
        double ustar_h1 = 0.0; // tentative velocity, L2(H1)
        double gap = 0.0;      // || u - u* ||_{L2(L2)}
    };

    Errors result() const {
        return {std::sqrt(sum_u_), std::sqrt(sum_ustar_), std::sqrt(sum_p_),
                std::sqrt(sum_ustar_h1_), std::sqrt(sum_gap_)};
    }

private:
    void accumulate_at(const SchemeState& state, double t) {
        const CompositeVelocity u = state.recovered(*fe_, tau_);
        const double eu = field_error_l2(*fe_, u, problem_->velocity_fn(), t);
        const double eustar = field_error_l2(*fe_, state.ustar.coeffs, problem_->velocity_fn(), t);
        const double ep =
            field_error_l2_pressure(*fe_, state.pressure.coeffs, problem_->total_pressure_fn(), t);
        const double eh1 = field_error_h1_aform(*fe_, state.ustar.coeffs, problem_->velocity_fn(), t);
        const double egap = l2_norm_recovery_gap(*fe_, state, tau_);
        sum_u_ += tau_ * eu * eu;
        sum_ustar_ += tau_ * eustar * eustar;
        sum_p_ += tau_ * ep * ep;
        sum_ustar_h1_ += tau_ * eh1 * eh1;
        sum_gap_ += tau_ * egap * egap;
    }

    const FeSystem* fe_;
    const SectorProblem* problem_;
    double tau_;
    double sum_u_ = 0.0, sum_ustar_ = 0.0, sum_p_ = 0.0, sum_ustar_h1_ = 0.0, sum_gap_ = 0.0;
};

// Least-squares slope of log2(error) against log2(tau).
inline double fit_slope(const std::vector<double>& taus, const std::vector<double>& errors) {
    if (taus.size() != errors.size() || taus.size() < 3)
        throw config_error("verification: slope fit needs at least 3 (tau, error) pairs");
    for (std::size_t i = 0; i < taus.size(); ++i)
        if (!(taus[i] > 0.0) || !(errors[i] > 0.0))
            throw config_error("verification: slope fit needs positive taus and errors");
    const std::size_t n = taus.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log2(taus[i]);
        const double y = std::log2(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw config_error("verification: slope fit needs distinct taus");
    return (n * sxy - sx * sy) / denom;
}

struct StudyRow {
    double tau = 0.0;
    ErrorAccumulator::Errors errors;
};

struct StudySlopes {
    double u = 0.0;
    double ustar = 0.0;
    double P = 0.0;
    double ustar_h1 = 0.0;
    double gap = 0.0;
};

struct StudyResult {
    std::vector<StudyRow> rows;
    std::optional<StudySlopes> slopes;  // present once >= 3 rows completed
    double max_res_vel = 0.0;
    double max_res_press = 0.0;
    std::optional<std::string> failure;  // set if a run aborted; rows hold partial results
};

inline StudySlopes fit_study_slopes(const std::vector<StudyRow>& rows) {
    std::vector<double> taus, eu, eustar, ep, eh1, egap;
    for (const StudyRow& r : rows) {
        taus.push_back(r.tau);
        eu.push_back(r.errors.u);
        eustar.push_back(r.errors.ustar);
        ep.push_back(r.errors.P);
        eh1.push_back(r.errors.ustar_h1);
        egap.push_back(r.errors.gap);
    }
    return {fit_slope(taus, eu), fit_slope(taus, eustar), fit_slope(taus, ep),
            fit_slope(taus, eh1), fit_slope(taus, egap)};
}

// One scheme run per tau on a shared mesh; errors accumulated per step.
inline StudyResult convergence_study(const SectorProblem& problem, double target_h,
                                     const std::vector<double>& tau_list, double T) {
    StudyResult out;
    TriMesh mesh = generate_sector_mesh(problem.r1(), problem.r2(), problem.theta1(),
                                        problem.theta2(), target_h);
    const FeSystem fe(std::move(mesh), problem.boundary_pb_fn());
    for (double tau : tau_list) {
        try {
            const SchemeConfig cfg = make_scheme_config(tau, T);
            const ProjectionScheme scheme(fe, manufactured_data(problem), cfg);
            ErrorAccumulator acc(fe, problem, tau);
            acc.seed_initial(scheme.init_state());
            scheme.run([&](const SchemeState& state, const StepReport& rep) {
                acc.add(state, rep);
                out.max_res_vel = std::max(out.max_res_vel, rep.res_vel);
                out.max_res_press = std::max(out.max_res_press, rep.res_press);
            });
            out.rows.push_back({tau, acc.result()});
        } catch (const std::exception& err) {
            out.failure = "study: run with tau = " + std::to_string(tau) + " failed: " + err.what();
            break;
        }
    }
    if (out.rows.size() >= 3) out.slopes = fit_study_slopes(out.rows);
    return out;
}

// ---- Finite-difference oracles for the manufactured fields ----

// Residual of du/dt + (u.grad)u - lap(u) + grad(p) - f with every derivative
// taken by central differences of the exact fields.
inline Vec2 fd_momentum_residual(const SectorProblem& pr, double x, double y, double t, double h) {
    auto u = [&](double xx, double yy, double tt) { return pr.exact_velocity(xx, yy, tt); };
    const Vec2 u0 = u(x, y, t);
    Vec2 res{0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
        const double ut = (u(x, y, t + h)[c] - u(x, y, t - h)[c]) / (2.0 * h);
        const double ux = (u(x + h, y, t)[c] - u(x - h, y, t)[c]) / (2.0 * h);
        const double uy = (u(x, y + h, t)[c] - u(x, y - h, t)[c]) / (2.0 * h);
        const double uxx = (u(x + h, y, t)[c] - 2.0 * u0[c] + u(x - h, y, t)[c]) / (h * h);
        const double uyy = (u(x, y + h, t)[c] - 2.0 * u0[c] + u(x, y - h, t)[c]) / (h * h);
        const double gradp =
            c == 0 ? (pr.exact_static_pressure(x + h, y, t) - pr.exact_static_pressure(x - h, y, t)) /
                         (2.0 * h)
                   : (pr.exact_static_pressure(x, y + h, t) - pr.exact_static_pressure(x, y - h, t)) /
                         (2.0 * h);
        res[c] = ut + u0[0] * ux + u0[1] * uy - (uxx + uyy) + gradp - pr.forcing_f(x, y, t)[c];
    }
    return res;
}

inline double fd_divergence(const SectorProblem& pr, double x, double y, double t, double h) {
    const double dux =
        (pr.exact_velocity(x + h, y, t)[0] - pr.exact_velocity(x - h, y, t)[0]) / (2.0 * h);
    const double duy =
        (pr.exact_velocity(x, y + h, t)[1] - pr.exact_velocity(x, y - h, t)[1]) / (2.0 * h);
    return dux + duy;
}

// ---- Property suite ----

struct PropertyCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;
    bool all_passed() const {
        for (const PropertyCheck& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

// Worst normalized |v' N(w) v| over random coefficient draws. The convection
// builder is a parameter so tests can verify the check rejects a broken one.
inline double max_skew_violation(
    const FeSystem& fe, const std::function<SparseMatrix(const std::vector<double>&)>& convection,
    int n_draws, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int draw = 0; draw < n_draws; ++draw) {
        std::vector<double> w(fe.dofmap.n_velocity_dofs());
        std::vector<double> v(fe.dofmap.n_velocity_dofs());
        for (double& x : w) x = gauss(rng);
        for (double& x : v) x = gauss(rng);
        const SparseMatrix n = convection(w);
        const double vnv = vec_dot(v, n.spmv(v));
        const double v2 = vec_dot(v, v);
        const double scale = std::max(max_abs_curl(w, fe.mesh, fe.dofmap, fe.quad), 1e-300);
        worst = std::max(worst, std::abs(vnv) / (v2 * scale));
    }
    return worst;
}

inline double reference_monomial_integral(int a, int b) {
    // integral of x^a y^b over the reference triangle = a! b! / (a+b+2)!
    double num = 1.0;
    for (int i = 2; i <= a; ++i) num *= i;
    for (int i = 2; i <= b; ++i) num *= i;
    double den = 1.0;
    for (int i = 2; i <= a + b + 2; ++i) den *= i;
    return num / den;
}

inline double max_quadrature_error(int degree) {
    const QuadratureRule rule = quadrature(degree);
    double worst = 0.0;
    for (int a = 0; a + 0 <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
            double sum = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double x = rule.points[q][1], y = rule.points[q][2];
                sum += rule.weights[q] * std::pow(x, a) * std::pow(y, b);
            }
            const double exact = reference_monomial_integral(a, b);
            worst = std::max(worst, std::abs(sum - exact) / exact);
        }
    }
    return worst;
}

// Runs every structural property on a small mesh; geometry and data come from
// the given problem. Each check reports its measured violation and threshold.
inline PropertyReport property_suite(const SectorProblem& problem) {
    PropertyReport report;
    auto push = [&report](const std::string& name, double measured, double threshold) {
        report.checks.push_back({name, measured <= threshold, measured, threshold});
    };

    push("quadrature_exactness_degree6", max_quadrature_error(6), 1e-13);
    push("no_slip_walls",
         std::max(std::abs(problem.U(problem.r1())), std::abs(problem.U(problem.r2()))), 1e-12);

    {
        std::mt19937 rng(20240613u);
        std::uniform_real_distribution<double> rad(problem.r1() + 0.05, problem.r2() - 0.05);
        std::uniform_real_distribution<double> ang(problem.theta1() + 0.05,
                                                   problem.theta2() - 0.05);
        std::uniform_real_distribution<double> time(0.0, 1.0);
        double worst_mom = 0.0, worst_div = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double r = rad(rng), th = ang(rng), t = time(rng);
            const double x = r * std::cos(th), y = r * std::sin(th);
            const Vec2 res = fd_momentum_residual(problem, x, y, t, 1e-4);
            worst_mom = std::max({worst_mom, std::abs(res[0]), std::abs(res[1])});
            worst_div = std::max(worst_div, std::abs(fd_divergence(problem, x, y, t, 1e-5)));
        }
        push("momentum_residual_fd", worst_mom, 1e-5);
        push("divergence_fd", worst_div, 1e-6);
    }

    // Small-mesh runs: skew-symmetry draws, zero-data energy decay, discrete
    // orthogonality of the recovered velocity, solver residuals.
    TriMesh mesh = generate_sector_mesh(problem.r1(), problem.r2(), problem.theta1(),
                                        problem.theta2(), 1.0 / 16.0);
    const FeSystem fe(std::move(mesh), [](double, double, double) { return 0.0; });

    push("convection_skew_symmetry",
         max_skew_violation(
             fe,
             [&fe](const std::vector<double>& w) {
                 return assemble_convection(w, fe.mesh, fe.dofmap, fe.quad);
             },
             100, 777u),
         1e-12);

    {
        const SchemeConfig cfg = make_scheme_config(1.0 / 16.0, 1.0);
        const ProblemData data = zero_data(
            [&problem](double x, double y) { return problem.initial_u0(x, y); });
        const ProjectionScheme scheme(fe, data, cfg);
        const SparseMatrix stiffness = assemble_pressure_stiffness(fe.mesh, fe.dofmap, fe.quad);
        std::vector<char> pressure_constrained(fe.dofmap.n_pressure_dofs(), 0);
        for (int idx : fe.pressure_bc.indices()) pressure_constrained[idx] = 1;

        SchemeState state = scheme.init_state();
        double prev_norm = l2_norm_composite(fe.mesh, fe.quad, fe.table, state.recovered(fe, cfg.tau));
        double worst_growth = 0.0, worst_res = 0.0, worst_ortho = 0.0;
        for (int k = 1; k <= cfg.n_steps; ++k) {
            const StepReport rep = scheme.step(state);
            worst_growth = std::max(worst_growth, (rep.norm_u - prev_norm) / prev_norm);
            prev_norm = rep.norm_u;
            worst_res = std::max({worst_res, rep.res_vel, rep.res_press});

            const CompositeVelocity u = state.recovered(fe, cfg.tau);
            const std::vector<double> pairing =
                pair_with_pressure_gradients(u, fe.mesh, fe.dofmap, fe.quad);
            for (int j = 0; j < fe.dofmap.n_pressure_dofs(); ++j) {
                if (pressure_constrained[j]) continue;
                const double grad_norm = std::sqrt(stiffness.entry(j, j));
                worst_ortho = std::max(worst_ortho,
                                       std::abs(pairing[j]) / (rep.norm_u * grad_norm));
            }
        }
        push("energy_decay_zero_data", worst_growth, 1e-10);
        push("discrete_orthogonality", worst_ortho, 1e-9);
        push("solver_residuals", worst_res, 1e-10);
    }

    return report;
}

}  // namespace tpns
