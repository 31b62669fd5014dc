#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucrlb {

/// Raised for malformed or out-of-range configuration. Carries the offending
/// field and the 1-based source line (0 when the field is missing).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, int line, const std::string& message)
        : std::runtime_error(message), field_(std::move(field)), line_(line) {}

    const std::string& field() const { return field_; }
    int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

/// Flat `key = value` configuration. Keys are dotted paths (`env.params.n`),
/// `#` starts a comment, blank lines are ignored, duplicate keys are errors.
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    int line_of(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    /// Comma-separated list of items, whitespace trimmed.
    std::vector<std::string> get_list(const std::string& key) const;

    /// All keys starting with `prefix`, with the prefix stripped.
    std::map<std::string, std::string> with_prefix(const std::string& prefix) const;

    void set(const std::string& key, const std::string& value, int line = 0);

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    const Entry& require(const std::string& key) const;

    std::map<std::string, Entry> entries_;
};

std::vector<std::string> split_list(const std::string& text, char separator = ',');
std::string trim(const std::string& text);

} // namespace ucrlb
