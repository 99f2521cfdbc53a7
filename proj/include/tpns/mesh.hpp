#pragma once

// Structured triangulation of the annular sector r1 <= r <= r2,
// theta1 <= theta <= theta2, with tagged boundary edges. The curved arcs are
// approximated by chords; the straight sides must lie on the coordinate axes.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "tpns/errors.hpp"

namespace tpns {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

enum class BoundaryTag {
    Gamma1,          // circular walls r = r1 and r = r2 (no-slip)
    Gamma2ThetaMin,  // straight side on the line y = 0
    Gamma2ThetaMax,  // straight side on the line x = 0
};

struct BoundaryEdge {
    int a = 0;
    int b = 0;
    BoundaryTag tag = BoundaryTag::Gamma1;
};

struct TriMesh {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<BoundaryEdge> boundary_edges;
    double h = 0.0;  // max over triangles of the longest edge
};

inline double triangle_area(const TriMesh& mesh, int t) {
    const Point2& p0 = mesh.vertices[mesh.triangles[t][0]];
    const Point2& p1 = mesh.vertices[mesh.triangles[t][1]];
    const Point2& p2 = mesh.vertices[mesh.triangles[t][2]];
    return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

// Maps a structured (n_r x n_theta) polar grid to Cartesian coordinates and
// splits every quad into two triangles with alternating diagonals.
inline TriMesh generate_sector_mesh(double r1, double r2, double theta1, double theta2,
                                    double target_h) {
    if (!(r1 > 0.0) || !(r2 > r1)) throw config_error("mesh: need 0 < r1 < r2");
    if (!(theta2 > theta1)) throw config_error("mesh: need theta1 < theta2");
    if (!(target_h > 0.0)) throw config_error("mesh: need target_h > 0");
    // The straight sides carry single-component velocity constraints, which
    // only make sense when they lie on the coordinate axes.
    if (std::abs(theta1) > 1e-12 || std::abs(theta2 - std::numbers::pi / 2) > 1e-12)
        throw config_error("mesh: unsupported geometry, straight sides must be axis-aligned "
                           "(theta1 = 0 and theta2 = pi/2)");

    const int n_r = static_cast<int>(std::ceil((r2 - r1) / target_h));
    const int n_t = static_cast<int>(std::ceil(r2 * (theta2 - theta1) / target_h));

    TriMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(n_r + 1) * (n_t + 1));
    // Row-major in (r, theta): vertex (i, j) = radius index i, angle index j.
    for (int i = 0; i <= n_r; ++i) {
        const double r = r1 + (r2 - r1) * static_cast<double>(i) / n_r;
        for (int j = 0; j <= n_t; ++j) {
            const double th = theta1 + (theta2 - theta1) * static_cast<double>(j) / n_t;
            Point2 p{r * std::cos(th), r * std::sin(th)};
            if (j == 0) p.y = 0.0;    // snap to the theta1 axis exactly
            if (j == n_t) p.x = 0.0;  // snap to the theta2 axis exactly
            mesh.vertices.push_back(p);
        }
    }
    auto vid = [n_t](int i, int j) { return i * (n_t + 1) + j; };

    mesh.triangles.reserve(static_cast<std::size_t>(2) * n_r * n_t);
    for (int i = 0; i < n_r; ++i) {
        for (int j = 0; j < n_t; ++j) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
            if ((i + j) % 2 == 0) {
                mesh.triangles.push_back({v00, v10, v11});
                mesh.triangles.push_back({v00, v11, v01});
            } else {
                mesh.triangles.push_back({v00, v10, v01});
                mesh.triangles.push_back({v10, v11, v01});
            }
        }
    }

    for (int j = 0; j < n_t; ++j) {
        mesh.boundary_edges.push_back({vid(0, j), vid(0, j + 1), BoundaryTag::Gamma1});
        mesh.boundary_edges.push_back({vid(n_r, j), vid(n_r, j + 1), BoundaryTag::Gamma1});
    }
    for (int i = 0; i < n_r; ++i) {
        mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), BoundaryTag::Gamma2ThetaMin});
        mesh.boundary_edges.push_back({vid(i, n_t), vid(i + 1, n_t), BoundaryTag::Gamma2ThetaMax});
    }

    double h = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        for (int e = 0; e < 3; ++e) {
            const Point2& a = mesh.vertices[mesh.triangles[t][e]];
            const Point2& b = mesh.vertices[mesh.triangles[t][(e + 1) % 3]];
            h = std::max(h, std::hypot(b.x - a.x, b.y - a.y));
        }
    }
    mesh.h = h;
    return mesh;
}

struct MeshStats {
    double h = 0.0;
    double total_area = 0.0;
    int n_vertices = 0;
    int n_triangles = 0;
    int n_gamma1_edges = 0;
    int n_gamma2_edges = 0;
};

inline MeshStats mesh_stats(const TriMesh& mesh) {
    MeshStats s;
    s.h = mesh.h;
    s.n_vertices = static_cast<int>(mesh.vertices.size());
    s.n_triangles = static_cast<int>(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) s.total_area += triangle_area(mesh, t);
    for (const BoundaryEdge& e : mesh.boundary_edges) {
        if (e.tag == BoundaryTag::Gamma1)
            ++s.n_gamma1_edges;
        else
            ++s.n_gamma2_edges;
    }
    return s;
}

inline const char* boundary_tag_name(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::Gamma1: return "G1";
        case BoundaryTag::Gamma2ThetaMin: return "G2A";
        case BoundaryTag::Gamma2ThetaMax: return "G2B";
    }
    return "G1";
}

inline void write_mesh(std::ostream& out, const TriMesh& mesh) {
    out << "tpns-mesh 1\n";
    out << mesh.vertices.size() << " " << mesh.triangles.size() << " "
        << mesh.boundary_edges.size() << "\n";
    char buf[128];
    for (const Point2& p : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x, p.y);
        out << buf;
    }
    for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    for (const BoundaryEdge& e : mesh.boundary_edges)
        out << e.a << " " << e.b << " " << boundary_tag_name(e.tag) << "\n";
}

inline void write_mesh_file(const std::string& path, const TriMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw io_error("mesh: cannot open '" + path + "' for writing");
    write_mesh(out, mesh);
    if (!out) throw io_error("mesh: write to '" + path + "' failed");
}

inline TriMesh read_mesh(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "tpns-mesh" || version != 1)
        throw io_error("mesh: bad header, expected 'tpns-mesh 1'");
    std::size_t nv = 0, nt = 0, nb = 0;
    if (!(in >> nv >> nt >> nb)) throw io_error("mesh: bad count line");
    TriMesh mesh;
    mesh.vertices.resize(nv);
    for (Point2& p : mesh.vertices)
        if (!(in >> p.x >> p.y)) throw io_error("mesh: truncated vertex list");
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles)
        if (!(in >> t[0] >> t[1] >> t[2])) throw io_error("mesh: truncated triangle list");
    mesh.boundary_edges.resize(nb);
    for (BoundaryEdge& e : mesh.boundary_edges) {
        std::string tag;
        if (!(in >> e.a >> e.b >> tag)) throw io_error("mesh: truncated boundary list");
        if (tag == "G1")
            e.tag = BoundaryTag::Gamma1;
        else if (tag == "G2A")
            e.tag = BoundaryTag::Gamma2ThetaMin;
        else if (tag == "G2B")
            e.tag = BoundaryTag::Gamma2ThetaMax;
        else
            throw io_error("mesh: unknown boundary tag '" + tag + "'");
    }
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        for (int e = 0; e < 3; ++e) {
            const Point2& a = mesh.vertices[mesh.triangles[t][e]];
            const Point2& b = mesh.vertices[mesh.triangles[t][(e + 1) % 3]];
            mesh.h = std::max(mesh.h, std::hypot(b.x - a.x, b.y - a.y));
        }
    }
    return mesh;
}

inline TriMesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("mesh: cannot open '" + path + "' for reading");
    return read_mesh(in);
}

}  // namespace tpns
