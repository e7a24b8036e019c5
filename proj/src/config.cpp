#include "gpman/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gpman/types.hpp"

namespace gpman {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) +
                               " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("config: empty key on line " + std::to_string(lineno));
        cfg.values_[key] = value;
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
    values_[trim(key)] = trim(value);
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw config_error("config: missing required key '" + key + "'");
    touched_[key] = true;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    touched_[key] = true;
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' is not a number: '" + v + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    touched_[key] = true;
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
    const double d = get_double(key);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw config_error("config: key '" + key + "' is not an integer");
    return i;
}

int Config::get_int(const std::string& key, int fallback) const {
    touched_[key] = true;
    return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    touched_[key] = true;
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw config_error("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<int> Config::get_int_list(const std::string& key) const {
    const std::string v = get_string(key);
    std::vector<int> out;
    const auto colon = v.find(':');
    try {
        if (colon != std::string::npos) {
            const int lo = std::stoi(v.substr(0, colon));
            const int hi = std::stoi(v.substr(colon + 1));
            for (int i = lo; i < hi; ++i) out.push_back(i);
        } else {
            std::istringstream ss(v);
            std::string cell;
            while (std::getline(ss, cell, ',')) out.push_back(std::stoi(trim(cell)));
        }
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' is not an integer list: '" + v + "'");
    }
    if (out.empty()) throw config_error("config: key '" + key + "' is an empty list");
    return out;
}

std::vector<std::uint64_t> Config::get_seed_list(const std::string& key,
                                                 const std::vector<std::uint64_t>& fallback) const {
    touched_[key] = true;
    if (!has(key)) return fallback;
    std::vector<std::uint64_t> out;
    for (int v : get_int_list(key)) {
        if (v < 0) throw config_error("config: seeds must be nonnegative");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!touched_.count(k)) out.push_back(k);
    return out;
}

} // namespace gpman
