#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "gpman/mesh.hpp"
#include "gpman/types.hpp"

using namespace gpman;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

double stiffness_row_sum_max(const DiscreteManifold& m) {
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.vertex_count());
    return (m.stiffness * ones).cwiseAbs().maxCoeff();
}

// regular tetrahedron, side 2*sqrt(2)
const char* kTetraOff =
    "OFF\n4 4 6\n"
    "1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n"
    "3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";

} // namespace

TEST_CASE("polyline csv: closed unit square") {
    const auto path = write_temp("square.csv", "0,0\n1,0\n1,1\n0,1\n");
    const DiscreteManifold m = load_mesh(path, MeshFormat::polyline_csv);
    CHECK(m.dim == 1);
    CHECK(m.ambient_dim == 2);
    CHECK(m.vertex_count() == 4);
    CHECK(m.total_mass() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(stiffness_row_sum_max(m) < 1e-10);
    // vertex order preserved from the file
    CHECK(m.vertices(1, 0) == 1.0);
    CHECK(m.vertices(1, 1) == 0.0);
}

TEST_CASE("off: regular tetrahedron accepted with analytic area") {
    const auto path = write_temp("tetra.off", kTetraOff);
    const DiscreteManifold m = load_mesh(path, MeshFormat::off);
    CHECK(m.vertex_count() == 4);
    CHECK(m.triangles.size() == 4);
    const double side = 2.0 * std::sqrt(2.0);
    CHECK(m.total_mass() == doctest::Approx(std::sqrt(3.0) * side * side).epsilon(1e-12));
}

TEST_CASE("ply: edge shared by three faces is rejected") {
    const std::string ply =
        "ply\nformat ascii 1.0\n"
        "element vertex 5\nproperty float x\nproperty float y\nproperty float z\n"
        "element face 3\nproperty list uchar int vertex_indices\nend_header\n"
        "0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 1\n"
        "3 0 1 2\n3 0 1 3\n3 0 1 4\n";
    const auto path = write_temp("nonmanifold.ply", ply);
    CHECK_THROWS_WITH_AS(load_mesh(path, MeshFormat::ply_ascii),
                         doctest::Contains("NonManifoldEdge"), io_error);
}

TEST_CASE("off: open mesh and zero-area cells are rejected") {
    const char* open_off =
        "OFF\n4 3 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n"
        "3 0 1 2\n3 0 3 1\n3 0 2 3\n";  // one face removed
    CHECK_THROWS_WITH_AS(load_mesh(write_temp("open.off", open_off), MeshFormat::off),
                         doctest::Contains("open boundary edge"), io_error);

    const char* degenerate_off =
        "OFF\n4 4 0\n0 0 0\n1 0 0\n2 0 0\n0 1 0\n"  // first three collinear
        "3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n";
    CHECK_THROWS_AS(load_mesh(write_temp("degen.off", degenerate_off), MeshFormat::off),
                    numerical_error);
}

TEST_CASE("icosphere: counts, radius, and area") {
    const DiscreteManifold ico = gen_icosphere(0, 1.0);
    CHECK(ico.vertex_count() == 12);
    CHECK(ico.triangles.size() == 20);

    const DiscreteManifold m = gen_icosphere(3, 2.5);
    CHECK(m.vertex_count() == 10 * 64 + 2);
    CHECK(static_cast<int>(m.triangles.size()) == 20 * 64);
    for (int i = 0; i < m.vertex_count(); ++i)
        CHECK(std::abs(m.vertices.row(i).norm() - 2.5) < 1e-12 * 2.5);
    // area converges to 4 pi r^2 from below
    const double sphere_area = 4.0 * std::numbers::pi * 2.5 * 2.5;
    CHECK(m.total_mass() < sphere_area);
    CHECK(m.total_mass() > 0.99 * sphere_area);
    CHECK(stiffness_row_sum_max(m) < 1e-10);

    CHECK_THROWS_AS(gen_icosphere(8, 1.0), config_error);
}

TEST_CASE("icosphere level 4 matches the 2562-node mesh") {
    const DiscreteManifold m = gen_icosphere(4, 1.0);
    CHECK(m.vertex_count() == 2562);
    CHECK(m.total_mass() ==
          doctest::Approx(4.0 * std::numbers::pi).epsilon(0.01));
}

TEST_CASE("dumbbell: perimeter oracle and spacing") {
    const double R = 1.0, w = 0.2, c = 2.2;
    const DiscreteManifold m = gen_dumbbell(1556, R, w, c);
    CHECK(m.vertex_count() == 1556);
    const double perimeter = dumbbell_perimeter(R, w, c);
    // closed-form: two lobe arcs plus two neck segments
    const double check = 4.0 * R * (std::numbers::pi - std::asin(w / R)) +
                         4.0 * (c - std::sqrt(R * R - w * w));
    CHECK(perimeter == doctest::Approx(check).epsilon(1e-15));
    CHECK(std::abs(m.total_mass() - perimeter) / perimeter < 1e-4);

    double hmin = 1e300, hmax = 0.0;
    for (int i = 0; i < m.vertex_count(); ++i) {
        const int j = (i + 1) % m.vertex_count();
        const double h = (m.vertices.row(i) - m.vertices.row(j)).norm();
        hmin = std::min(hmin, h);
        hmax = std::max(hmax, h);
    }
    CHECK(hmax / hmin <= 1.5);
}

TEST_CASE("dumbbell: coarse curve stays valid, bad parameters rejected") {
    const DiscreteManifold m = gen_dumbbell(8, 1.0, 0.2, 2.2);
    CHECK(m.vertex_count() == 8);
    CHECK(stiffness_row_sum_max(m) < 1e-10);

    CHECK_THROWS_AS(gen_dumbbell(7, 1.0, 0.2, 2.2), config_error);
    CHECK_THROWS_AS(gen_dumbbell(100, 1.0, 1.2, 2.2), config_error);   // w >= R
    CHECK_THROWS_AS(gen_dumbbell(100, 2.0, 0.2, 1.5), config_error);   // R >= c
}

TEST_CASE("fem: circle mass equals circumference, stiffness PSD") {
    const DiscreteManifold m = gen_circle(512, 1.0);
    CHECK(std::abs(m.total_mass() - 2.0 * std::numbers::pi) < 1e-9);

    const DiscreteManifold small = gen_icosphere(1, 1.0);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(small.stiffness);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("fem: total mass invariant under vertex reindexing") {
    const DiscreteManifold m = gen_dumbbell(64, 1.0, 0.2, 2.2);
    // rotate vertex labels by 13
    const int n = m.vertex_count();
    DiscreteManifold p;
    p.dim = 1;
    p.ambient_dim = 2;
    p.vertices.resize(n, 2);
    const int shift = 13;
    for (int i = 0; i < n; ++i) p.vertices.row((i + shift) % n) = m.vertices.row(i);
    p.cycle.resize(n);
    for (int i = 0; i < n; ++i) p.cycle[i] = (m.cycle[i] + shift) % n;
    assemble_fem(p);
    CHECK(p.total_mass() == doctest::Approx(m.total_mass()).epsilon(1e-14));
}

TEST_CASE("mesh: unreferenced vertex is rejected") {
    const char* off =
        "OFF\n5 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n9 9 9\n"
        "3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";
    CHECK_THROWS_WITH_AS(load_mesh(write_temp("unref.off", off), MeshFormat::off),
                         doctest::Contains("not referenced"), io_error);
}
