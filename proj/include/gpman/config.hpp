#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gpman {

// Flat "key = value" configuration: one pair per line, '#' comments, CLI
// --set overrides applied on top. Unknown keys are rejected by the consumers
// (typo safety), so every getter records the key it touched.
class Config {
public:
    static Config from_file(const std::string& path);
    // line-oriented text (used by tests and for --set handling)
    static Config from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // "a,b,c" or "lo:hi" (half-open) integer lists
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<std::uint64_t> get_seed_list(const std::string& key,
                                             const std::vector<std::uint64_t>& fallback) const;

    // Keys present but never read by any getter; used to reject typos.
    std::vector<std::string> unused_keys() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, bool> touched_;
};

} // namespace gpman
