#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace lalab {

/// Parsed `key = value` configuration file.
///
/// Format:
///   - one `key = value` pair per line
///   - `[section]` headers prefix following keys as `section.key`
///   - lists are bracketed and comma-separated: `priors = [0.2, 0.3, 0.5]`
///   - `#` starts a comment; blank lines are ignored
///
/// Lookups mark keys as consumed; `ensure_all_used` rejects typos and
/// leftovers so a misspelled parameter never silently falls back to a
/// default.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int_or(const std::string& key, long long fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& key) const;

    /// Throws ConfigError naming every key that was never consumed. Keys
    /// matching an allowed prefix are exempt, so a file shared between
    /// subcommands can carry sections the current one does not read.
    void ensure_all_used(const std::vector<std::string>& allowed_prefixes = {}) const;

    /// Keys currently present under `section.` (consumes nothing).
    std::vector<std::string> section_keys(const std::string& section) const;

private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;

    const std::string& raw(const std::string& key) const;
};

} // namespace lalab
