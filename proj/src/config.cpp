#include "dualcav/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dualcav::cli {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

bool valid_path(const std::string& p) {
    if (p.empty() || p.front() == '.' || p.back() == '.') return false;
    for (char c : p) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
    }
    return true;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.text_ = text;
    cfg.origin_ = origin;

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    ConfigSection* current = nullptr;
    while (std::getline(stream, raw)) {
        ++line_no;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                      ": unterminated section header",
                                  line_no);
            }
            const std::string path = trim(line.substr(1, line.size() - 2));
            if (!valid_path(path)) {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                      ": invalid section name '" + path + "'",
                                  line_no);
            }
            cfg.sections_.push_back(ConfigSection{path, line_no, {}});
            current = &cfg.sections_.back();
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value' or '[section]'",
                              line_no);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key)) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": invalid key '" +
                                  key + "'",
                              line_no);
        }
        if (value.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty value for '" +
                                  key + "'",
                              line_no);
        }
        if (!current) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": key '" + key +
                                  "' outside any [section]",
                              line_no);
        }
        if (!current->entries.emplace(key, ConfigEntry{value, line_no}).second) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                                  key + "' in [" + current->path + "]",
                              line_no);
        }
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

std::vector<const ConfigSection*> Config::sections(const std::string& path) const {
    std::vector<const ConfigSection*> out;
    for (const auto& s : sections_) {
        if (s.path == path) out.push_back(&s);
    }
    return out;
}

const ConfigSection* Config::unique_section(const std::string& path) const {
    const auto matches = sections(path);
    if (matches.empty()) return nullptr;
    if (matches.size() > 1) {
        throw ConfigError(origin_ + ":" + std::to_string(matches[1]->line) + ": section [" +
                              path + "] appears more than once",
                          matches[1]->line);
    }
    return matches.front();
}

bool Config::has_section(const std::string& path) const { return !sections(path).empty(); }

namespace {

const ConfigEntry& require_entry(const ConfigSection& s, const std::string& key) {
    const auto it = s.entries.find(key);
    if (it == s.entries.end()) {
        throw ConfigError("missing key '" + key + "' in [" + s.path + "] (section at line " +
                              std::to_string(s.line) + ")",
                          s.line);
    }
    it->second.used = true;
    return it->second;
}

const ConfigEntry* find_entry(const ConfigSection& s, const std::string& key) {
    const auto it = s.entries.find(key);
    if (it == s.entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
}

double parse_double(const ConfigEntry& e, const std::string& key, const std::string& section) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (errno != 0 || end == e.value.c_str() || *end != '\0') {
        throw ConfigError("line " + std::to_string(e.line) + ": value of '" + key + "' in [" +
                              section + "] is not a number: '" + e.value + "'",
                          e.line);
    }
    return v;
}

}  // namespace

double Config::get_double(const ConfigSection& s, const std::string& key) {
    return parse_double(require_entry(s, key), key, s.path);
}

std::optional<double> Config::get_double_opt(const ConfigSection& s, const std::string& key) {
    const ConfigEntry* e = find_entry(s, key);
    if (!e) return std::nullopt;
    return parse_double(*e, key, s.path);
}

uint64_t Config::get_u64(const ConfigSection& s, const std::string& key) {
    const ConfigEntry& e = require_entry(s, key);
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (errno != 0 || end == e.value.c_str() || *end != '\0') {
        throw ConfigError("line " + std::to_string(e.line) + ": value of '" + key + "' in [" +
                              s.path + "] is not an unsigned integer: '" + e.value + "'",
                          e.line);
    }
    return static_cast<uint64_t>(v);
}

int Config::get_int(const ConfigSection& s, const std::string& key) {
    const double v = get_double(s, key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        const auto& e = s.entries.at(key);
        throw ConfigError("line " + std::to_string(e.line) + ": value of '" + key + "' in [" +
                              s.path + "] must be an integer",
                          e.line);
    }
    return i;
}

std::optional<int> Config::get_int_opt(const ConfigSection& s, const std::string& key) {
    if (s.entries.find(key) == s.entries.end()) return std::nullopt;
    return get_int(s, key);
}

std::string Config::get_string(const ConfigSection& s, const std::string& key) {
    return require_entry(s, key).value;
}

std::optional<std::string> Config::get_string_opt(const ConfigSection& s,
                                                  const std::string& key) {
    const ConfigEntry* e = find_entry(s, key);
    if (!e) return std::nullopt;
    return e->value;
}

std::optional<Config::UnusedKey> Config::first_unused() const {
    for (const auto& s : sections_) {
        for (const auto& [key, entry] : s.entries) {
            if (!entry.used) return UnusedKey{s.path, key, entry.line};
        }
    }
    return std::nullopt;
}

std::string fnv1a64_hex(const std::string& text) {
    uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

}  // namespace dualcav::cli
