#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <string>
#include <vector>

namespace gpman {

enum class MeshFormat { off, ply_ascii, polyline_csv };

// Discretized compact manifold without boundary (closed polyline for d=1,
// closed edge-manifold triangle mesh for d=2) together with the FEM
// discretization of the Laplace-Beltrami operator: stiffness L (sparse,
// symmetric PSD, row sums 0) and lumped diagonal mass M.
struct DiscreteManifold {
    int dim = 0;          // intrinsic dimension d (1 or 2)
    int ambient_dim = 0;  // D (2 or 3)
    Eigen::MatrixXd vertices;                   // n x D
    std::vector<int> cycle;                     // d=1: closed cycle, cycle[i]-cycle[i+1] edges + wrap
    std::vector<std::array<int, 3>> triangles;  // d=2
    Eigen::SparseMatrix<double> stiffness;      // n x n
    Eigen::VectorXd mass;                       // diagonal of the lumped mass matrix

    int vertex_count() const { return static_cast<int>(vertices.rows()); }
    double total_mass() const { return mass.sum(); }
};

// Assemble stiffness/mass for an already-validated manifold in place.
// d=1: linear elements on the polyline; d=2: cotangent weights with
// barycentric lumped mass. Throws numerical_error on degenerate cells.
void assemble_fem(DiscreteManifold& m);

// Load OFF / ASCII PLY triangle meshes or a polyline CSV (one "x,y[,z]" line
// per vertex, implicit closure). Validates closedness and edge-manifoldness,
// then assembles FEM matrices. Vertex order is preserved from the file.
DiscreteManifold load_mesh(const std::string& path, MeshFormat format);

// Subdivided icosahedron projected to the radius-r sphere.
// 10*4^level + 2 vertices, 20*4^level triangles. level <= 7.
DiscreteManifold gen_icosphere(int level, double radius);

// Closed planar curve bounding two radius-R disks centered at (+-c, 0)
// joined by a straight neck of half-width w (w < R < c). n_vertices even,
// >= 8, spaced near-uniformly by arclength.
DiscreteManifold gen_dumbbell(int n_vertices, double lobe_radius, double neck_halfwidth,
                              double center_offset);

// Uniform closed n-gon on the radius-r circle (d=1 convenience used by the
// harness and tests).
DiscreteManifold gen_circle(int n_vertices, double radius);

// Analytic perimeter of the gen_dumbbell construction (test oracle lives in
// tests; this is the geometry the generator targets).
double dumbbell_perimeter(double lobe_radius, double neck_halfwidth, double center_offset);

} // namespace gpman
