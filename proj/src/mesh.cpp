#include "gpman/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "gpman/types.hpp"

namespace gpman {

namespace {

using Triplet = Eigen::Triplet<double>;

void validate_connectivity(const DiscreteManifold& m) {
    const int n = m.vertex_count();
    std::vector<char> referenced(n, 0);
    if (m.dim == 1) {
        if (static_cast<int>(m.cycle.size()) != n || n < 3)
            throw io_error("polyline: need a closed cycle visiting every vertex (n >= 3)");
        for (int v : m.cycle) {
            if (v < 0 || v >= n) throw io_error("polyline: cell index out of range");
            referenced[v] = 1;
        }
    } else {
        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& t : m.triangles) {
            for (int k = 0; k < 3; ++k) {
                const int a = t[k], b = t[(k + 1) % 3];
                if (a < 0 || a >= n || b < 0 || b >= n)
                    throw io_error("mesh: cell index out of range");
                referenced[a] = 1;
                ++edge_count[{std::min(a, b), std::max(a, b)}];
            }
        }
        for (const auto& [edge, count] : edge_count) {
            if (count > 2)
                throw io_error("mesh: NonManifoldEdge (" + std::to_string(edge.first) + "," +
                               std::to_string(edge.second) + ") shared by " +
                               std::to_string(count) + " faces");
            if (count == 1)
                throw io_error("mesh: open boundary edge (" + std::to_string(edge.first) + "," +
                               std::to_string(edge.second) + "); manifolds must be closed");
        }
    }
    for (int v = 0; v < n; ++v)
        if (!referenced[v])
            throw io_error("mesh: vertex " + std::to_string(v) + " not referenced by any cell");
}

void assemble_polyline(DiscreteManifold& m) {
    const int n = m.vertex_count();
    std::vector<Triplet> trip;
    trip.reserve(4 * n);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < n; ++e) {
        const int i = m.cycle[e];
        const int j = m.cycle[(e + 1) % n];
        const double h = (m.vertices.row(i) - m.vertices.row(j)).norm();
        if (!(h > 0.0)) throw numerical_error("assemble_fem: zero-length polyline edge");
        const double w = 1.0 / h;
        trip.emplace_back(i, i, w);
        trip.emplace_back(j, j, w);
        trip.emplace_back(i, j, -w);
        trip.emplace_back(j, i, -w);
        mass[i] += 0.5 * h;
        mass[j] += 0.5 * h;
    }
    m.stiffness.resize(n, n);
    m.stiffness.setFromTriplets(trip.begin(), trip.end());
    m.mass = std::move(mass);
}

void assemble_cotangent(DiscreteManifold& m) {
    const int n = m.vertex_count();
    std::vector<Triplet> trip;
    trip.reserve(12 * m.triangles.size());
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
    for (const auto& t : m.triangles) {
        const Eigen::Vector3d pa = m.vertices.row(t[0]);
        const Eigen::Vector3d pb = m.vertices.row(t[1]);
        const Eigen::Vector3d pc = m.vertices.row(t[2]);
        const Eigen::Vector3d ab = pb - pa, ac = pc - pa, bc = pc - pb;
        const double area2 = ab.cross(ac).norm();  // twice the area
        const double lmax = std::max({ab.norm(), ac.norm(), bc.norm()});
        if (!(area2 > 1e-12 * lmax * lmax))
            throw numerical_error("assemble_fem: zero-area triangle (" + std::to_string(t[0]) +
                                  "," + std::to_string(t[1]) + "," + std::to_string(t[2]) + ")");
        // cot of the angle at each vertex = dot of adjacent edges / (2 area)
        const double cot_a = ab.dot(ac) / area2;
        const double cot_b = (-ab).dot(bc) / area2;
        const double cot_c = (-ac).dot(-bc) / area2;
        const struct { int i, j; double cot; } entries[3] = {
            {t[1], t[2], cot_a}, {t[2], t[0], cot_b}, {t[0], t[1], cot_c}};
        for (const auto& e : entries) {
            const double w = 0.5 * e.cot;
            trip.emplace_back(e.i, e.j, -w);
            trip.emplace_back(e.j, e.i, -w);
            trip.emplace_back(e.i, e.i, w);
            trip.emplace_back(e.j, e.j, w);
        }
        const double third = area2 / 6.0;  // area/3
        for (int k = 0; k < 3; ++k) mass[t[k]] += third;
    }
    m.stiffness.resize(n, n);
    m.stiffness.setFromTriplets(trip.begin(), trip.end());
    m.mass = std::move(mass);
}

} // namespace

void assemble_fem(DiscreteManifold& m) {
    validate_connectivity(m);
    if (m.dim == 1)
        assemble_polyline(m);
    else
        assemble_cotangent(m);
}

DiscreteManifold gen_icosphere(int level, double radius) {
    if (level < 0 || level > 7) throw config_error("gen_icosphere: level must be in [0, 7]");
    if (!(radius > 0.0)) throw config_error("gen_icosphere: radius must be positive");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Eigen::Vector3d v = (verts[a] + verts[b]).normalized();
            verts.push_back(v);
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    DiscreteManifold m;
    m.dim = 2;
    m.ambient_dim = 3;
    m.vertices.resize(static_cast<int>(verts.size()), 3);
    for (int i = 0; i < static_cast<int>(verts.size()); ++i)
        m.vertices.row(i) = radius * verts[i].transpose();
    m.triangles = std::move(faces);
    assemble_fem(m);
    return m;
}

double dumbbell_perimeter(double R, double w, double c) {
    const double alpha = std::asin(w / R);
    const double x_neck = std::sqrt(R * R - w * w);
    return 4.0 * R * (std::numbers::pi - alpha) + 4.0 * (c - x_neck);
}

DiscreteManifold gen_dumbbell(int n_vertices, double R, double w, double c) {
    if (n_vertices < 8 || n_vertices % 2 != 0)
        throw config_error("gen_dumbbell: n_vertices must be even and >= 8");
    if (!(w > 0.0 && w < R && R < c))
        throw config_error("gen_dumbbell: parameters must satisfy 0 < w < R < c");
    const double alpha = std::asin(w / R);
    const double x_neck = std::sqrt(R * R - w * w);
    if (!(c - x_neck > 0.0))
        throw config_error("gen_dumbbell: neck does not meet the lobes (c <= sqrt(R^2 - w^2))");

    const double arc_len = 2.0 * R * (std::numbers::pi - alpha);
    const double seg_len = 2.0 * (c - x_neck);
    const double lens[4] = {arc_len, seg_len, arc_len, seg_len};
    const double total = 2.0 * (arc_len + seg_len);

    // proportional segment allocation, then largest/smallest-spacing repair
    int k[4];
    int assigned = 0;
    for (int p = 0; p < 4; ++p) {
        k[p] = std::max(1, static_cast<int>(std::lround(n_vertices * lens[p] / total)));
        assigned += k[p];
    }
    while (assigned < n_vertices) {
        int pick = 0;  // widest current spacing gets the extra vertex
        for (int p = 1; p < 4; ++p)
            if (lens[p] / k[p] > lens[pick] / k[pick]) pick = p;
        ++k[pick];
        ++assigned;
    }
    while (assigned > n_vertices) {
        int pick = -1;  // tightest spacing among pieces that can spare one
        for (int p = 0; p < 4; ++p)
            if (k[p] > 1 && (pick < 0 || lens[p] / k[p] < lens[pick] / k[pick])) pick = p;
        --k[pick];
        --assigned;
    }

    std::vector<Eigen::Vector2d> pts;
    pts.reserve(n_vertices);
    // right lobe: theta in [-(pi - alpha), pi - alpha] around (c, 0)
    for (int i = 0; i < k[0]; ++i) {
        const double th = -(std::numbers::pi - alpha) + 2.0 * (std::numbers::pi - alpha) * i / k[0];
        pts.emplace_back(c + R * std::cos(th), R * std::sin(th));
    }
    // top neck segment: (x_neck side of right lobe) -> left lobe, y = +w
    for (int i = 0; i < k[1]; ++i) {
        const double t = static_cast<double>(i) / k[1];
        pts.emplace_back((c - x_neck) * (1.0 - t) + (-c + x_neck) * t, w);
    }
    // left lobe: phi in [alpha, 2 pi - alpha] around (-c, 0)
    for (int i = 0; i < k[2]; ++i) {
        const double ph = alpha + (2.0 * std::numbers::pi - 2.0 * alpha) * i / k[2];
        pts.emplace_back(-c + R * std::cos(ph), R * std::sin(ph));
    }
    // bottom neck segment, y = -w
    for (int i = 0; i < k[3]; ++i) {
        const double t = static_cast<double>(i) / k[3];
        pts.emplace_back((-c + x_neck) * (1.0 - t) + (c - x_neck) * t, -w);
    }

    DiscreteManifold m;
    m.dim = 1;
    m.ambient_dim = 2;
    m.vertices.resize(static_cast<int>(pts.size()), 2);
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) m.vertices.row(i) = pts[i].transpose();
    m.cycle.resize(pts.size());
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) m.cycle[i] = i;
    assemble_fem(m);
    return m;
}

DiscreteManifold gen_circle(int n_vertices, double radius) {
    if (n_vertices < 3) throw config_error("gen_circle: need at least 3 vertices");
    if (!(radius > 0.0)) throw config_error("gen_circle: radius must be positive");
    DiscreteManifold m;
    m.dim = 1;
    m.ambient_dim = 2;
    m.vertices.resize(n_vertices, 2);
    for (int i = 0; i < n_vertices; ++i) {
        const double th = 2.0 * std::numbers::pi * i / n_vertices;
        m.vertices(i, 0) = radius * std::cos(th);
        m.vertices(i, 1) = radius * std::sin(th);
    }
    m.cycle.resize(n_vertices);
    for (int i = 0; i < n_vertices; ++i) m.cycle[i] = i;
    assemble_fem(m);
    return m;
}

} // namespace gpman
