#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gpman/mesh.hpp"
#include "gpman/types.hpp"

namespace gpman {

namespace {

std::string next_content_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto pos = line.find_first_not_of(" \t");
        if (pos == std::string::npos) continue;
        if (line[pos] == '#') continue;
        return line.substr(pos);
    }
    throw io_error("mesh parse: unexpected end of file");
}

DiscreteManifold load_off(std::istream& in) {
    std::string header = next_content_line(in);
    if (header.rfind("OFF", 0) != 0) throw io_error("OFF parse: missing OFF header");
    // counts may share the header line ("OFF 8 6 0") or follow it
    std::string counts = header.size() > 3 ? header.substr(3) : next_content_line(in);
    if (counts.find_first_not_of(" \t") == std::string::npos) counts = next_content_line(in);
    std::istringstream cs(counts);
    long nv = 0, nf = 0, ne = 0;
    if (!(cs >> nv >> nf >> ne) || nv <= 0 || nf <= 0)
        throw io_error("OFF parse: bad element counts");

    DiscreteManifold m;
    m.dim = 2;
    m.ambient_dim = 3;
    m.vertices.resize(nv, 3);
    for (long i = 0; i < nv; ++i) {
        std::istringstream ls(next_content_line(in));
        if (!(ls >> m.vertices(i, 0) >> m.vertices(i, 1) >> m.vertices(i, 2)))
            throw io_error("OFF parse: bad vertex line " + std::to_string(i));
    }
    m.triangles.reserve(nf);
    for (long i = 0; i < nf; ++i) {
        std::istringstream ls(next_content_line(in));
        int cnt = 0;
        if (!(ls >> cnt)) throw io_error("OFF parse: bad face line " + std::to_string(i));
        if (cnt != 3) throw io_error("OFF parse: only triangle faces are supported");
        std::array<int, 3> t{};
        if (!(ls >> t[0] >> t[1] >> t[2]))
            throw io_error("OFF parse: bad face indices on line " + std::to_string(i));
        m.triangles.push_back(t);
    }
    return m;
}

DiscreteManifold load_ply_ascii(std::istream& in) {
    if (next_content_line(in) != "ply") throw io_error("PLY parse: missing ply magic");
    long nv = -1, nf = -1;
    int vertex_props = 0;
    int x_pos = -1, y_pos = -1, z_pos = -1;
    bool ascii = false;
    std::string current_element;
    for (;;) {
        std::istringstream ls(next_content_line(in));
        std::string tok;
        ls >> tok;
        if (tok == "end_header") break;
        if (tok == "comment") continue;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (tok == "element") {
            std::string name;
            long count = 0;
            ls >> name >> count;
            current_element = name;
            if (name == "vertex") nv = count;
            if (name == "face") nf = count;
        } else if (tok == "property" && current_element == "vertex") {
            std::string type, name;
            ls >> type >> name;
            if (type == "list") throw io_error("PLY parse: list property on vertices unsupported");
            if (name == "x") x_pos = vertex_props;
            if (name == "y") y_pos = vertex_props;
            if (name == "z") z_pos = vertex_props;
            ++vertex_props;
        }
    }
    if (!ascii) throw io_error("PLY parse: only ascii format is supported");
    if (nv <= 0 || nf <= 0 || x_pos < 0 || y_pos < 0 || z_pos < 0)
        throw io_error("PLY parse: missing vertex/face elements or x/y/z properties");

    DiscreteManifold m;
    m.dim = 2;
    m.ambient_dim = 3;
    m.vertices.resize(nv, 3);
    for (long i = 0; i < nv; ++i) {
        std::istringstream ls(next_content_line(in));
        std::vector<double> vals(vertex_props);
        for (int p = 0; p < vertex_props; ++p)
            if (!(ls >> vals[p])) throw io_error("PLY parse: bad vertex line " + std::to_string(i));
        m.vertices(i, 0) = vals[x_pos];
        m.vertices(i, 1) = vals[y_pos];
        m.vertices(i, 2) = vals[z_pos];
    }
    m.triangles.reserve(nf);
    for (long i = 0; i < nf; ++i) {
        std::istringstream ls(next_content_line(in));
        int cnt = 0;
        if (!(ls >> cnt)) throw io_error("PLY parse: bad face line " + std::to_string(i));
        if (cnt != 3) throw io_error("PLY parse: only triangle faces are supported");
        std::array<int, 3> t{};
        if (!(ls >> t[0] >> t[1] >> t[2]))
            throw io_error("PLY parse: bad face indices on line " + std::to_string(i));
        m.triangles.push_back(t);
    }
    return m;
}

DiscreteManifold load_polyline_csv(std::istream& in) {
    std::vector<std::array<double, 3>> pts;
    int cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ls(line);
        std::array<double, 3> p{0, 0, 0};
        int c = 0;
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            if (c >= 3) throw io_error("polyline_csv parse: more than 3 coordinates on a line");
            try {
                p[c] = std::stod(cell);
            } catch (const std::exception&) {
                throw io_error("polyline_csv parse: bad number '" + cell + "'");
            }
            ++c;
        }
        if (c < 2) throw io_error("polyline_csv parse: need x,y[,z] per line");
        if (cols == 0)
            cols = c;
        else if (cols != c)
            throw io_error("polyline_csv parse: inconsistent coordinate count");
        pts.push_back(p);
    }
    if (pts.size() < 3) throw io_error("polyline_csv parse: need at least 3 vertices");

    DiscreteManifold m;
    m.dim = 1;
    m.ambient_dim = cols;
    m.vertices.resize(static_cast<int>(pts.size()), cols);
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
        for (int c = 0; c < cols; ++c) m.vertices(i, c) = pts[i][c];
    m.cycle.resize(pts.size());
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) m.cycle[i] = i;
    return m;
}

} // namespace

DiscreteManifold load_mesh(const std::string& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in) throw io_error("load_mesh: cannot open " + path);
    DiscreteManifold m;
    switch (format) {
        case MeshFormat::off: m = load_off(in); break;
        case MeshFormat::ply_ascii: m = load_ply_ascii(in); break;
        case MeshFormat::polyline_csv: m = load_polyline_csv(in); break;
    }
    assemble_fem(m);
    return m;
}

} // namespace gpman
