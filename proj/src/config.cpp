#include "ucrlb/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ucrlb {

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text, char separator) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, separator)) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig config;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string content = trim(raw);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", line, "expected 'key = value'");
        const std::string key = trim(content.substr(0, eq));
        if (key.empty()) throw ConfigError("", line, "empty key");
        if (config.contains(key))
            throw ConfigError(key, line, "duplicate key (first set on line " +
                                             std::to_string(config.line_of(key)) + ")");
        config.set(key, trim(content.substr(eq + 1)), line);
    }
    return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", 0, "cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

int KeyValueConfig::line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
}

const KeyValueConfig::Entry& KeyValueConfig::require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(key, 0, "missing required field");
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const { return require(key).value; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    return contains(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const Entry& entry = require(key);
    try {
        std::size_t used = 0;
        const double value = std::stod(entry.value, &used);
        if (used != entry.value.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ConfigError(key, entry.line, "expected a real number, got '" + entry.value + "'");
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    return contains(key) ? get_double(key) : fallback;
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key) const {
    const Entry& entry = require(key);
    std::uint64_t value = 0;
    const char* begin = entry.value.data();
    const char* end = begin + entry.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError(key, entry.line,
                          "expected a nonnegative integer, got '" + entry.value + "'");
    return value;
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
    return contains(key) ? get_uint(key) : fallback;
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
    return split_list(require(key).value);
}

std::map<std::string, std::string> KeyValueConfig::with_prefix(const std::string& prefix) const {
    std::map<std::string, std::string> out;
    for (const auto& [key, entry] : entries_)
        if (key.rfind(prefix, 0) == 0) out.emplace(key.substr(prefix.size()), entry.value);
    return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value, int line) {
    entries_[key] = Entry{value, line};
}

} // namespace ucrlb
