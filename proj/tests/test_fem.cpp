// P1/P2 bases, element geometry, DOF numbering, interpolation, and the
// velocity/pressure boundary constraint builders.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "tpns/fem.hpp"
#include "tpns/mesh.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

// Unit square split along the diagonal (0,0)-(1,1): two CCW triangles.
tpns::TriMesh two_triangle_square() {
    tpns::TriMesh mesh;
    mesh.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
    mesh.h = std::sqrt(2.0);
    return mesh;
}

std::array<double, 3> random_barycentric(std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double x = dist(rng), y = dist(rng);
    if (x + y > 1.0) {
        x = 1.0 - x;
        y = 1.0 - y;
    }
    return {1.0 - x - y, x, y};
}

}  // namespace

TEST_CASE("P1 and P2 bases form a partition of unity", "[fem]") {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 50; ++trial) {
        const auto b = random_barycentric(rng);
        const tpns::P1Basis p1 = tpns::eval_p1_basis(b);
        const tpns::P2Basis p2 = tpns::eval_p2_basis(b);
        double s1 = 0.0, s2 = 0.0;
        tpns::Vec2 g1{0.0, 0.0}, g2{0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            s1 += p1.value[i];
            g1[0] += p1.grad[i][0];
            g1[1] += p1.grad[i][1];
        }
        for (int i = 0; i < 6; ++i) {
            s2 += p2.value[i];
            g2[0] += p2.grad[i][0];
            g2[1] += p2.grad[i][1];
        }
        CHECK(s1 == Catch::Approx(1.0).margin(1e-14));
        CHECK(s2 == Catch::Approx(1.0).margin(1e-14));
        CHECK(std::abs(g1[0]) < 1e-14);
        CHECK(std::abs(g1[1]) < 1e-14);
        CHECK(std::abs(g2[0]) < 1e-13);
        CHECK(std::abs(g2[1]) < 1e-13);
    }
}

TEST_CASE("P2 basis is nodal: one at its own node, zero at the others", "[fem]") {
    // Node order: vertices 0,1,2 then midpoints of edges (0,1), (1,2), (2,0).
    const std::array<std::array<double, 3>, 6> nodes = {{{1, 0, 0},
                                                         {0, 1, 0},
                                                         {0, 0, 1},
                                                         {0.5, 0.5, 0},
                                                         {0, 0.5, 0.5},
                                                         {0.5, 0, 0.5}}};
    for (int n = 0; n < 6; ++n) {
        const tpns::P2Basis basis = tpns::eval_p2_basis(nodes[n]);
        for (int i = 0; i < 6; ++i)
            CHECK(basis.value[i] == Catch::Approx(i == n ? 1.0 : 0.0).margin(1e-15));
    }
}

TEST_CASE("element geometry maps and gradient transforms are exact", "[fem]") {
    tpns::TriMesh mesh;
    // A deliberately skewed triangle: p0=(1,2), p1=(4,3), p2=(2,5).
    mesh.vertices = {{1.0, 2.0}, {4.0, 3.0}, {2.0, 5.0}};
    mesh.triangles = {{0, 1, 2}};
    const tpns::ElementGeometry geom = tpns::element_geometry(mesh, 0);
    // det = (3)(3) - (1)(1) = 8, area = 4.
    CHECK(geom.det == Catch::Approx(8.0));
    CHECK(geom.area == Catch::Approx(4.0));
    CHECK(geom.area == Catch::Approx(tpns::triangle_area(mesh, 0)));

    const tpns::Point2 mid = geom.map({0.0, 0.5, 0.5});  // midpoint of edge (p1, p2)
    CHECK(mid.x == Catch::Approx(3.0));
    CHECK(mid.y == Catch::Approx(4.0));

    // The physical gradient of barycentric lambda_1 must satisfy
    // grad(l1) . (p1 - p0) = 1 and grad(l1) . (p2 - p0) = 0.
    const tpns::Vec2 grad_l1 = geom.to_physical_grad(tpns::kBaryGrad[1]);
    CHECK(grad_l1[0] * 3.0 + grad_l1[1] * 1.0 == Catch::Approx(1.0));
    CHECK(grad_l1[0] * 1.0 + grad_l1[1] * 3.0 == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("two-triangle square produces the nine-node quadratic layout", "[fem]") {
    const tpns::TriMesh mesh = two_triangle_square();
    const tpns::DofMap dofmap = tpns::build_dof_map(mesh);
    CHECK(dofmap.n_vertices() == 4);
    CHECK(dofmap.n_edges() == 5);
    CHECK(dofmap.n_p2_nodes() == 9);
    CHECK(dofmap.n_velocity_dofs() == 18);
    CHECK(dofmap.n_pressure_dofs() == 4);

    // Shared diagonal (0,2) resolves to the same node from either side.
    CHECK(dofmap.edge_node(0, 2) == dofmap.edge_node(2, 0));
    const tpns::Point2 diag_mid = dofmap.node_coord(dofmap.edge_node(0, 2));
    CHECK(diag_mid.x == Catch::Approx(0.5));
    CHECK(diag_mid.y == Catch::Approx(0.5));

    // Vertices 1 and 3 are not connected by any edge.
    CHECK_THROWS_AS(dofmap.edge_node(1, 3), std::out_of_range);

    // x- and y-component DOFs live in separate blocks.
    CHECK(dofmap.velocity_dof(3, 0) == 3);
    CHECK(dofmap.velocity_dof(3, 1) == 12);
}

TEST_CASE("coarse sector mesh DOF counts are frozen", "[fem]") {
    const tpns::TriMesh mesh = tpns::generate_sector_mesh(2.0, 3.0, 0.0, kPi / 2, 0.5);
    const tpns::DofMap dofmap = tpns::build_dof_map(mesh);
    // 33 vertices, 40 triangles: Euler gives 33 + 40 - 1 = 72 edges.
    CHECK(dofmap.n_vertices() == 33);
    CHECK(dofmap.n_edges() == 72);
    CHECK(dofmap.n_p2_nodes() == 105);
    CHECK(dofmap.n_velocity_dofs() == 210);
    CHECK(dofmap.n_pressure_dofs() == 33);
}

TEST_CASE("quadratic interpolation reproduces affine fields exactly", "[fem]") {
    const tpns::TriMesh mesh = tpns::generate_sector_mesh(2.0, 3.0, 0.0, kPi / 2, 0.5);
    const tpns::DofMap dofmap = tpns::build_dof_map(mesh);
    auto affine = [](double x, double y, double t) {
        return tpns::Vec2{1.0 + 2.0 * x - y + t, 3.0 * x + 4.0 * y};
    };
    const tpns::Field field = tpns::interpolate_p2(affine, 0.25, dofmap);
    for (int n = 0; n < dofmap.n_p2_nodes(); ++n) {
        const tpns::Point2& p = dofmap.node_coord(n);
        const tpns::Vec2 v = affine(p.x, p.y, 0.25);
        CHECK(field.coeffs[dofmap.velocity_dof(n, 0)] == v[0]);
        CHECK(field.coeffs[dofmap.velocity_dof(n, 1)] == v[1]);
    }

    auto linear = [](double x, double y, double) { return 2.0 - x + 5.0 * y; };
    const tpns::Field pressure = tpns::interpolate_p1(linear, 0.0, dofmap);
    REQUIRE(pressure.coeffs.size() == static_cast<std::size_t>(dofmap.n_pressure_dofs()));
    for (int v = 0; v < dofmap.n_pressure_dofs(); ++v) {
        const tpns::Point2& p = dofmap.node_coord(v);
        CHECK(pressure.coeffs[v] == linear(p.x, p.y, 0.0));
    }
}

TEST_CASE("velocity constraints pin walls fully and sides tangentially", "[fem]") {
    const tpns::TriMesh mesh = tpns::generate_sector_mesh(2.0, 3.0, 0.0, kPi / 2, 0.5);
    const tpns::DofMap dofmap = tpns::build_dof_map(mesh);
    const tpns::ConstraintSet bc = tpns::build_velocity_constraints(mesh, dofmap);

    // Wall closure: 2 arcs x (11 vertices + 10 midpoints) = 42 nodes, both
    // components pinned -> 84. Straight sides: (3 vertices + 2 midpoints)
    // each, minus the 2 corner vertices already claimed by the walls -> 3
    // nodes per side, one component each -> 6. Total 90.
    CHECK(bc.size() == 90);

    // All constrained values are zero at any time.
    for (double v : bc.values_at(0.37)) CHECK(v == 0.0);

    // Indices are sorted strictly ascending (no duplicates).
    for (int i = 1; i < bc.size(); ++i) REQUIRE(bc.indices()[i] > bc.indices()[i - 1]);

    // Classify per node for spot checks.
    std::vector<int> constrained_components(dofmap.n_p2_nodes(), 0);
    for (int idx : bc.indices()) {
        const int node = idx % dofmap.n_p2_nodes();
        const int comp = idx / dofmap.n_p2_nodes();
        constrained_components[node] |= (comp == 0 ? 1 : 2);
    }
    int full = 0, x_only = 0, y_only = 0;
    for (int n = 0; n < dofmap.n_p2_nodes(); ++n) {
        const tpns::Point2& p = dofmap.node_coord(n);
        const double r = std::hypot(p.x, p.y);
        const bool on_wall = std::abs(r - 2.0) < 1e-9 || std::abs(r - 3.0) < 1e-9;
        switch (constrained_components[n]) {
            case 3: {
                ++full;
                // Fully pinned nodes must lie on (or, for edge midpoints of a
                // wall chord, near) one of the circles.
                REQUIRE((on_wall || (r > 2.0 - 0.1 && r < 3.0 + 1e-9)));
                break;
            }
            case 1: {
                ++x_only;
                REQUIRE(p.y == 0.0);  // theta = 0 side pins the tangential u_x
                break;
            }
            case 2: {
                ++y_only;
                REQUIRE(p.x == 0.0);  // theta = pi/2 side pins the tangential u_y
                break;
            }
            default: break;
        }
    }
    CHECK(full == 42);
    CHECK(x_only == 3);
    CHECK(y_only == 3);

    // Corner vertices inherit the full wall constraint, not the side one.
    for (const tpns::Point2 corner : {tpns::Point2{2.0, 0.0}, tpns::Point2{3.0, 0.0}}) {
        for (int n = 0; n < dofmap.n_vertices(); ++n) {
            const tpns::Point2& p = dofmap.node_coord(n);
            if (std::abs(p.x - corner.x) < 1e-12 && std::abs(p.y - corner.y) < 1e-12)
                CHECK(constrained_components[n] == 3);
        }
    }
}

TEST_CASE("pressure constraints cover exactly the straight-side vertices", "[fem]") {
    const tpns::TriMesh mesh = tpns::generate_sector_mesh(2.0, 3.0, 0.0, kPi / 2, 0.5);
    const tpns::DofMap dofmap = tpns::build_dof_map(mesh);
    auto pb = [](double x, double y, double t) { return x + 10.0 * y + 100.0 * t; };
    const tpns::ConstraintSet bc = tpns::build_pressure_constraints(mesh, dofmap, pb);

    // 3 vertices per straight side (r = 2, 2.5, 3), corners included.
    CHECK(bc.size() == 6);
    const std::vector<double> values = bc.values_at(2.0);
    for (int i = 0; i < bc.size(); ++i) {
        const tpns::Point2& p = dofmap.node_coord(bc.indices()[i]);
        const bool on_side = (p.y == 0.0) || (p.x == 0.0);
        REQUIRE(on_side);
        CHECK(values[i] == pb(p.x, p.y, 2.0));
    }
}

TEST_CASE("side edges off their axis are rejected", "[fem]") {
    tpns::TriMesh mesh = two_triangle_square();
    mesh.boundary_edges = {{0, 1, tpns::BoundaryTag::Gamma2ThetaMin}};
    mesh.vertices[1].y = 0.125;  // bend the "y = 0" side off the axis
    const tpns::DofMap dofmap = tpns::build_dof_map(mesh);
    CHECK_THROWS_AS(tpns::build_velocity_constraints(mesh, dofmap), tpns::config_error);
}
