#pragma once

#include <map>
#include <string>
#include <vector>

namespace epimod {

/// Plain-text key-value experiment configuration: one `key = value` per line,
/// `#` comments, dotted keys as sections (e.g. `modulate.arima = off`).
/// Lookup errors name the offending key.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const; // throws when missing
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const; // comma separated

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace epimod
