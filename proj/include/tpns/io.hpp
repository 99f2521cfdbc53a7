#pragma once

// Run configuration (flat-key JSON), CSV and VTK writers, and the command
// entry points behind the CLI subcommands.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tpns/errors.hpp"
#include "tpns/manufactured.hpp"
#include "tpns/mesh.hpp"
#include "tpns/scheme.hpp"
#include "tpns/verification.hpp"

namespace tpns {

struct RunConfig {
    double r1 = 2.0;
    double r2 = 3.0;
    double theta1 = 0.0;
    double theta2 = std::numbers::pi / 2;
    double p_in = 1.0;
    double p_out = -1.0;
    double target_h = 1.0 / 32.0;
    double tau = 1.0 / 16.0;
    double T = 1.0;
    std::vector<double> tau_list = {1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0};
    LinearSolverKind pressure_solver = LinearSolverKind::direct;
    std::string out_dir = "out";
    int vtk_every = 0;  // write solution_XXXX.vtk every N steps; 0 disables

    SectorProblem problem() const { return {r1, r2, theta1, theta2, p_in, p_out}; }
};

inline void validate_tau(double tau, double T, const std::string& label) {
    if (!(tau > 0.0)) throw config_error("config: " + label + " must be positive");
    if (!(tau < 1.0)) throw config_error("config: " + label + " must be < 1");
    const double n = std::round(T / tau);
    if (n < 1.0 || std::abs(n * tau - T) > 1e-12 * std::max(1.0, std::abs(T)))
        throw config_error("config: " + label + " must divide the final time T");
}

inline void validate_config(const RunConfig& cfg) {
    if (!(cfg.r1 > 0.0) || !(cfg.r2 > cfg.r1))
        throw config_error("config: need 0 < r1 < r2");
    if (!(cfg.theta2 > cfg.theta1))
        throw config_error("config: need theta1 < theta2");
    if (!(cfg.target_h > 0.0)) throw config_error("config: target_h must be positive");
    if (!(cfg.T > 0.0)) throw config_error("config: T must be positive");
    validate_tau(cfg.tau, cfg.T, "tau");
    if (cfg.tau_list.empty()) throw config_error("config: tau_list must not be empty");
    for (double tau : cfg.tau_list) validate_tau(tau, cfg.T, "tau_list entry");
    if (cfg.vtk_every < 0) throw config_error("config: vtk_every must be >= 0");
    if (!std::isfinite(cfg.p_in) || !std::isfinite(cfg.p_out))
        throw config_error("config: p_in and p_out must be finite");
}

inline RunConfig parse_config_json(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("config: top level must be a JSON object");
    static const std::set<std::string> known = {
        "r1",     "r2",  "theta1",   "theta2",          "p_in",    "p_out",    "target_h",
        "tau",    "T",   "tau_list", "pressure_solver", "out_dir", "vtk_every"};
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw config_error("config: unknown key \"" + item.key() + "\"");

    RunConfig cfg;
    auto num = [&j](const char* key, double& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) throw config_error(std::string("config: ") + key + " must be a number");
        slot = j[key].get<double>();
    };
    num("r1", cfg.r1);
    num("r2", cfg.r2);
    num("theta1", cfg.theta1);
    num("theta2", cfg.theta2);
    num("p_in", cfg.p_in);
    num("p_out", cfg.p_out);
    num("target_h", cfg.target_h);
    num("tau", cfg.tau);
    num("T", cfg.T);
    if (j.contains("tau_list")) {
        if (!j["tau_list"].is_array())
            throw config_error("config: tau_list must be an array of numbers");
        cfg.tau_list.clear();
        for (const auto& v : j["tau_list"]) {
            if (!v.is_number()) throw config_error("config: tau_list must be an array of numbers");
            cfg.tau_list.push_back(v.get<double>());
        }
    }
    if (j.contains("pressure_solver")) {
        const std::string s = j["pressure_solver"].get<std::string>();
        if (s == "direct")
            cfg.pressure_solver = LinearSolverKind::direct;
        else if (s == "cg")
            cfg.pressure_solver = LinearSolverKind::cg;
        else
            throw config_error("config: pressure_solver must be \"direct\" or \"cg\"");
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("vtk_every")) {
        if (!j["vtk_every"].is_number_integer())
            throw config_error("config: vtk_every must be an integer");
        cfg.vtk_every = j["vtk_every"].get<int>();
    }
    validate_config(cfg);
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("config: cannot open \"" + path + "\"");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& err) {
        throw config_error("config: invalid JSON in \"" + path + "\": " + err.what());
    }
    return parse_config_json(j);
}

// 17 significant digits: round-trip exact for 64-bit floats.
inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("io: cannot open \"" + path.string() + "\" for writing");
    return out;
}

inline void write_steps_csv(const std::filesystem::path& path,
                            const std::vector<StepReport>& reports) {
    std::ofstream out = open_output(path);
    out << "k,t,res_vel,res_press,norm_ustar,norm_u,norm_div_ustar\n";
    for (const StepReport& r : reports)
        out << r.k << ',' << fmt_g17(r.t) << ',' << fmt_g17(r.res_vel) << ','
            << fmt_g17(r.res_press) << ',' << fmt_g17(r.norm_ustar) << ',' << fmt_g17(r.norm_u)
            << ',' << fmt_g17(r.norm_div_ustar) << '\n';
    if (!out) throw io_error("io: write failed for \"" + path.string() + "\"");
}

inline void write_errors_csv(const std::filesystem::path& path, const StudyResult& study) {
    std::ofstream out = open_output(path);
    out << "tau,err_u_L2L2,err_ustar_L2L2,err_P_L2L2,err_ustar_L2H1,err_u_minus_ustar\n";
    for (const StudyRow& row : study.rows)
        out << fmt_g17(row.tau) << ',' << fmt_g17(row.errors.u) << ',' << fmt_g17(row.errors.ustar)
            << ',' << fmt_g17(row.errors.P) << ',' << fmt_g17(row.errors.ustar_h1) << ','
            << fmt_g17(row.errors.gap) << '\n';
    if (study.slopes)
        out << "slope," << fmt_g17(study.slopes->u) << ',' << fmt_g17(study.slopes->ustar) << ','
            << fmt_g17(study.slopes->P) << ',' << fmt_g17(study.slopes->ustar_h1) << ','
            << fmt_g17(study.slopes->gap) << '\n';
    if (!out) throw io_error("io: write failed for \"" + path.string() + "\"");
}

inline void write_slopes_csv(const std::filesystem::path& path, const StudySlopes& slopes) {
    std::ofstream out = open_output(path);
    out << "quantity,slope\n";
    out << "err_u_L2L2," << fmt_g17(slopes.u) << '\n';
    out << "err_ustar_L2L2," << fmt_g17(slopes.ustar) << '\n';
    out << "err_P_L2L2," << fmt_g17(slopes.P) << '\n';
    out << "err_ustar_L2H1," << fmt_g17(slopes.ustar_h1) << '\n';
    out << "err_u_minus_ustar," << fmt_g17(slopes.gap) << '\n';
    if (!out) throw io_error("io: write failed for \"" + path.string() + "\"");
}

inline void write_properties_csv(const std::filesystem::path& path, const PropertyReport& report) {
    std::ofstream out = open_output(path);
    out << "name,measured,threshold,passed\n";
    for (const PropertyCheck& c : report.checks)
        out << c.name << ',' << fmt_g17(c.measured) << ',' << fmt_g17(c.threshold) << ','
            << (c.passed ? 1 : 0) << '\n';
    if (!out) throw io_error("io: write failed for \"" + path.string() + "\"");
}

// Legacy ASCII unstructured grid; velocity and pressure as vertex data
// (quadratic velocity sampled at the vertices only).
inline void write_vtk(const std::filesystem::path& path, const FeSystem& fe,
                      const SchemeState& state) {
    const TriMesh& mesh = fe.mesh;
    std::ofstream out = open_output(path);
    out << "# vtk DataFile Version 3.0\n";
    out << "tpns snapshot step " << state.k << "\n";
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.vertices.size() << " double\n";
    for (const Point2& p : mesh.vertices)
        out << fmt_g17(p.x) << ' ' << fmt_g17(p.y) << " 0\n";
    out << "CELLS " << mesh.triangles.size() << ' ' << 4 * mesh.triangles.size() << '\n';
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << mesh.triangles.size() << '\n';
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) out << "5\n";
    out << "POINT_DATA " << mesh.vertices.size() << '\n';
    out << "VECTORS velocity double\n";
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const double ux = state.ustar.coeffs[fe.dofmap.velocity_dof(static_cast<int>(v), 0)];
        const double uy = state.ustar.coeffs[fe.dofmap.velocity_dof(static_cast<int>(v), 1)];
        out << fmt_g17(ux) << ' ' << fmt_g17(uy) << " 0\n";
    }
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
        out << fmt_g17(state.pressure.coeffs[v]) << '\n';
    if (!out) throw io_error("io: write failed for \"" + path.string() + "\"");
}

inline void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw io_error("io: cannot create output directory \"" + cfg.out_dir + "\"");
}

// Maps thrown errors to the CLI exit-code contract:
// 0 success, 1 usage/config/I-O error, 2 solver failure, 3 property failure.
template <typename Fn>
int guarded_command(Fn&& fn) {
    try {
        return fn();
    } catch (const config_error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (const io_error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (const solver_error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
}

inline int cmd_mesh(const RunConfig& cfg) {
    return guarded_command([&]() {
        ensure_out_dir(cfg);
        const TriMesh mesh =
            generate_sector_mesh(cfg.r1, cfg.r2, cfg.theta1, cfg.theta2, cfg.target_h);
        const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / "mesh.txt";
        write_mesh_file(path.string(), mesh);
        const MeshStats stats = mesh_stats(mesh);
        std::cout << "mesh: " << stats.n_vertices << " vertices, " << stats.n_triangles
                  << " triangles, h = " << fmt_g17(stats.h) << " -> " << path.string() << '\n';
        return 0;
    });
}

inline int cmd_run(const RunConfig& cfg) {
    return guarded_command([&]() {
        ensure_out_dir(cfg);
        const SectorProblem problem = cfg.problem();
        TriMesh mesh = generate_sector_mesh(cfg.r1, cfg.r2, cfg.theta1, cfg.theta2, cfg.target_h);
        const FeSystem fe(std::move(mesh), problem.boundary_pb_fn());
        SchemeConfig scfg = make_scheme_config(cfg.tau, cfg.T);
        scfg.pressure_solver = cfg.pressure_solver;
        const ProjectionScheme scheme(fe, manufactured_data(problem), scfg);

        const std::filesystem::path out_dir(cfg.out_dir);
        auto vtk_name = [&out_dir](int k) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "solution_%04d.vtk", k);
            return out_dir / buf;
        };

        SchemeState state = scheme.init_state();
        if (cfg.vtk_every > 0) write_vtk(vtk_name(0), fe, state);
        std::vector<StepReport> reports;
        reports.reserve(scfg.n_steps);
        for (int k = 1; k <= scfg.n_steps; ++k) {
            reports.push_back(scheme.step(state));
            if (cfg.vtk_every > 0 && (k % cfg.vtk_every == 0 || k == scfg.n_steps))
                write_vtk(vtk_name(k), fe, state);
        }
        write_steps_csv(out_dir / "steps.csv", reports);
        const StepReport& last = reports.back();
        std::cout << "run: " << scfg.n_steps << " steps, final |u| = " << fmt_g17(last.norm_u)
                  << ", max residuals ok -> " << (out_dir / "steps.csv").string() << '\n';
        return 0;
    });
}

inline int cmd_study(const RunConfig& cfg) {
    return guarded_command([&]() {
        ensure_out_dir(cfg);
        const SectorProblem problem = cfg.problem();
        const StudyResult study = convergence_study(problem, cfg.target_h, cfg.tau_list, cfg.T);
        const std::filesystem::path out_dir(cfg.out_dir);
        write_errors_csv(out_dir / "errors.csv", study);
        if (study.slopes) write_slopes_csv(out_dir / "slopes.csv", *study.slopes);
        if (study.failure) throw solver_error(*study.failure);
        if (study.slopes)
            std::cout << "study: slopes u " << fmt_g17(study.slopes->u) << ", ustar "
                      << fmt_g17(study.slopes->ustar) << ", P " << fmt_g17(study.slopes->P)
                      << ", ustar_H1 " << fmt_g17(study.slopes->ustar_h1) << ", gap "
                      << fmt_g17(study.slopes->gap) << '\n';
        std::cout << "study: " << study.rows.size() << " runs -> "
                  << (out_dir / "errors.csv").string() << '\n';
        return 0;
    });
}

inline int cmd_check(const RunConfig& cfg) {
    return guarded_command([&]() {
        ensure_out_dir(cfg);
        const SectorProblem problem = cfg.problem();
        const PropertyReport report = property_suite(problem);
        write_properties_csv(std::filesystem::path(cfg.out_dir) / "properties.csv", report);
        for (const PropertyCheck& c : report.checks)
            std::cout << (c.passed ? "PASS" : "FAIL") << ' ' << c.name
                      << " measured = " << fmt_g17(c.measured)
                      << " threshold = " << fmt_g17(c.threshold) << '\n';
        return report.all_passed() ? 0 : 3;
    });
}

}  // namespace tpns
