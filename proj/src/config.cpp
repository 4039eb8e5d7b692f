#include "epimod/config.hpp"

#include "epimod/errors.hpp"

#include <fstream>
#include <sstream>

namespace epimod {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(Errc::ParseError, "cannot open config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
}

Config Config::parse_string(const std::string& text) {
    Config config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw_error(Errc::ParseError,
                        "config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(trimmed.substr(0, eq));
        if (key.empty()) {
            throw_error(Errc::ParseError, "config line " + std::to_string(line_no) + ": empty key");
        }
        config.values_[key] = trim(trimmed.substr(eq + 1));
    }
    return config;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw_error(Errc::ParseError, "missing config key '" + key + "'");
    return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(values_.at(key), &pos);
        if (pos != values_.at(key).size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw_error(Errc::ParseError, "config key '" + key + "' is not a number");
    }
}

long long Config::get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(values_.at(key), &pos);
        if (pos != values_.at(key).size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw_error(Errc::ParseError, "config key '" + key + "' is not an integer");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = values_.at(key);
    if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
    if (v == "off" || v == "false" || v == "no" || v == "0") return false;
    throw_error(Errc::ParseError, "config key '" + key + "' is not a boolean (on/off)");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
    std::vector<std::string> items;
    if (!has(key)) return items;
    std::istringstream ss(values_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) items.push_back(t);
    }
    return items;
}

} // namespace epimod
