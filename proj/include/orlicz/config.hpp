#pragma once

// Line-oriented `key = value` configuration files with `#` comments.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "orlicz/errors.hpp"

namespace orlicz {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::string_view text) {
        KeyValueConfig cfg;
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const std::string body = trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("line " + std::to_string(lineno) + ": expected `key = value`");
            }
            std::string key = trim(std::string_view(body).substr(0, eq));
            std::string value = trim(std::string_view(body).substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    [[nodiscard]] bool contains(const std::string& key) const { return values_.count(key) != 0; }

    [[nodiscard]] std::optional<std::string> get(const std::string& key) const {
        if (auto it = values_.find(key); it != values_.end()) return it->second;
        return std::nullopt;
    }

    [[nodiscard]] std::string require(const std::string& key) const {
        if (auto v = get(key)) return *v;
        throw ConfigError("missing config key: " + key);
    }

    [[nodiscard]] double get_double(const std::string& key, double fallback) const {
        if (auto v = get(key)) return to_double(key, *v);
        return fallback;
    }

    [[nodiscard]] double require_double(const std::string& key) const { return to_double(key, require(key)); }

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    [[nodiscard]] const std::map<std::string, std::string>& entries() const { return values_; }

private:
    static double to_double(const std::string& key, const std::string& text) {
        try {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key `" + key + "` is not a number: " + text);
        }
    }

    std::map<std::string, std::string> values_;
};

}  // namespace orlicz
