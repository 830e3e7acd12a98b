#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lobkit {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Plain-text `key = value` configuration. Lines starting with '#' and blank
/// lines are ignored. Serialization is sorted by key, so two equal configs
/// always print identically.
class KvConfig {
public:
    static KvConfig parse(std::string_view text);
    static KvConfig load(const std::string& path);

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    bool has(const std::string& key) const { return values_.contains(key); }
    void erase(const std::string& key) { values_.erase(key); }

    /// Overlays every key of `other` onto this config.
    void merge(const KvConfig& other);

    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;

    /// Keys not present in `allowed`, sorted.
    std::vector<std::string> unknown_keys(const std::set<std::string>& allowed) const;

    std::string serialize() const;
    const std::map<std::string, std::string>& values() const { return values_; }

    bool operator==(const KvConfig&) const = default;

private:
    std::map<std::string, std::string> values_;
};

/// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace lobkit
