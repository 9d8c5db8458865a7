#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace mfbm {

/// Minimal key = value configuration with [section] headers. Keys are stored
/// flat as "section.key" in file order, so echoing a config back out is
/// deterministic. Lines starting with '#' or ';' are comments.
class KvConfig {
public:
    static KvConfig parse(const std::string& text) {
        KvConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string s = trim_(line);
            if (s.empty() || s[0] == '#' || s[0] == ';')
                continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw std::invalid_argument("config line " + std::to_string(lineno) +
                                                ": unterminated section header");
                section = trim_(s.substr(1, s.size() - 2));
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": expected key = value");
            std::string key = trim_(s.substr(0, eq));
            std::string val = trim_(s.substr(eq + 1));
            if (key.empty())
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": empty key");
            cfg.set(section.empty() ? key : section + "." + key, val);
        }
        return cfg;
    }

    static KvConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    void set(const std::string& key, const std::string& value) {
        for (auto& kv : items_)
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        items_.emplace_back(key, value);
    }

    bool has(const std::string& key) const {
        return std::any_of(items_.begin(), items_.end(),
                           [&](const auto& kv) { return kv.first == key; });
    }

    const std::string& get_string(const std::string& key) const {
        for (const auto& kv : items_)
            if (kv.first == key)
                return kv.second;
        throw std::invalid_argument("config: missing required key '" + key + "'");
    }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        return has(key) ? get_string(key) : dflt;
    }

    double get_double(const std::string& key) const { return to_double_(key, get_string(key)); }
    double get_double(const std::string& key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }

    std::uint64_t get_u64(const std::string& key) const {
        const std::string& s = get_string(key);
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw std::invalid_argument("config: key '" + key + "' is not an unsigned integer: " + s);
        }
    }
    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const {
        return has(key) ? get_u64(key) : dflt;
    }

    bool get_bool(const std::string& key, bool dflt) const {
        if (!has(key))
            return dflt;
        const std::string& s = get_string(key);
        if (s == "true" || s == "1" || s == "yes" || s == "on")
            return true;
        if (s == "false" || s == "0" || s == "no" || s == "off")
            return false;
        throw std::invalid_argument("config: key '" + key + "' is not a boolean: " + s);
    }

    std::vector<double> get_double_list(const std::string& key) const {
        const std::string& s = get_string(key);
        std::vector<double> out;
        std::string item;
        std::istringstream in(s);
        while (std::getline(in, item, ',')) {
            const std::string t = trim_(item);
            if (t.empty())
                continue;
            out.push_back(to_double_(key, t));
        }
        if (out.empty())
            throw std::invalid_argument("config: key '" + key + "' is an empty list");
        return out;
    }

    const std::vector<std::pair<std::string, std::string>>& items() const noexcept {
        return items_;
    }

    /// Sectioned JSON echo of the raw key/value pairs, in file order.
    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        for (const auto& kv : items_) {
            const auto dot = kv.first.find('.');
            if (dot == std::string::npos)
                j[kv.first] = kv.second;
            else
                j[kv.first.substr(0, dot)][kv.first.substr(dot + 1)] = kv.second;
        }
        return j;
    }

private:
    static std::string trim_(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return "";
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static double to_double_(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw std::invalid_argument("config: key '" + key + "' is not a number: " + s);
        }
    }

    std::vector<std::pair<std::string, std::string>> items_;
};

} // namespace mfbm
