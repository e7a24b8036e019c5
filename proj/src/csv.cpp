#include "gpman/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpman/types.hpp"

namespace gpman {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);  // binary: LF endings everywhere
        if (!out) throw io_error("cannot write " + tmp);
        out << content;
        if (!out) throw io_error("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("rename failed for " + path + ": " + ec.message());
}

void export_field(const Eigen::VectorXd& values, const std::string& path) {
    for (int i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw numerical_error("export_field: non-finite value at vertex " + std::to_string(i));
    std::string body = "vertex_id,value\n";
    body.reserve(32 * static_cast<std::size_t>(values.size()) + 16);
    for (int i = 0; i < values.size(); ++i) {
        body += std::to_string(i);
        body += ',';
        body += format_double(values[i]);
        body += '\n';
    }
    write_text_atomic(path, body);
}

Eigen::VectorXd read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("read_field: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("vertex_id,value", 0) != 0)
        throw io_error("read_field: missing header in " + path);
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw io_error("read_field: bad line in " + path);
        vals.push_back(std::stod(line.substr(comma + 1)));
    }
    Eigen::VectorXd out(static_cast<int>(vals.size()));
    for (int i = 0; i < out.size(); ++i) out[i] = vals[i];
    return out;
}

} // namespace gpman
