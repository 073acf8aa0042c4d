#include "lalab/config_file.hpp"

#include "lalab/csv.hpp"
#include "lalab/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lalab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value, const std::string& key) {
    std::string body = trim(value);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw ConfigError("key '" + key + "': expected a bracketed list, got '" + value + "'");
    body = body.substr(1, body.size() - 2);
    std::vector<std::string> items;
    std::string cur;
    for (char c : body) {
        if (c == ',') {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = trim(cur);
    if (!last.empty()) items.push_back(last);
    for (const auto& it : items)
        if (it.empty()) throw ConfigError("key '" + key + "': empty list element");
    return items;
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cf;
    cf.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        if (cf.values_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cf.values_[key] = value;
    }
    return cf;
}

bool ConfigFile::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& ConfigFile::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError(origin_ + ": missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
}

std::string ConfigFile::get_string(const std::string& key) const { return raw(key); }

std::string ConfigFile::get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double ConfigFile::get_double(const std::string& key) const {
    const std::string& v = raw(key);
    try {
        return csv::parse_double(v);
    } catch (const ConfigError&) {
        throw ConfigError(origin_ + ": key '" + key + "': not a number: '" + v + "'");
    }
}

double ConfigFile::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long ConfigFile::get_int(const std::string& key) const {
    const std::string& v = raw(key);
    long long out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError(origin_ + ": key '" + key + "': not an integer: '" + v + "'");
    return out;
}

long long ConfigFile::get_int_or(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigFile::get_u64(const std::string& key) const {
    const std::string& v = raw(key);
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError(origin_ + ": key '" + key + "': not an unsigned integer: '" + v + "'");
    return out;
}

std::uint64_t ConfigFile::get_u64_or(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

std::vector<double> ConfigFile::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(raw(key), key)) {
        try {
            out.push_back(csv::parse_double(item));
        } catch (const ConfigError&) {
            throw ConfigError(origin_ + ": key '" + key + "': not a number: '" + item + "'");
        }
    }
    return out;
}

std::vector<std::string> ConfigFile::get_string_list(const std::string& key) const {
    return split_list(raw(key), key);
}

void ConfigFile::ensure_all_used(const std::vector<std::string>& allowed_prefixes) const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
        if (used_.count(key)) continue;
        bool allowed = false;
        for (const auto& prefix : allowed_prefixes)
            if (key.rfind(prefix, 0) == 0) {
                allowed = true;
                break;
            }
        if (allowed) continue;
        if (!unknown.empty()) unknown += ", ";
        unknown += key;
    }
    if (!unknown.empty())
        throw ConfigError(origin_ + ": unknown key(s): " + unknown);
}

std::vector<std::string> ConfigFile::section_keys(const std::string& section) const {
    std::vector<std::string> out;
    const std::string prefix = section + ".";
    for (const auto& [key, value] : values_)
        if (key.rfind(prefix, 0) == 0) out.push_back(key);
    return out;
}

} // namespace lalab
