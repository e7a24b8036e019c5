#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gpman {

// Per-vertex scalar field as CSV: header "vertex_id,value", LF endings,
// 17 significant digits (round-trips doubles bitwise). Written atomically
// (temp file + rename).
void export_field(const Eigen::VectorXd& values, const std::string& path);

// Read back a field CSV (test round-trips and summary recomputation).
Eigen::VectorXd read_field(const std::string& path);

// Generic atomic text-file write.
void write_text_atomic(const std::string& path, const std::string& content);

std::string format_double(double v);  // %.17g

} // namespace gpman
