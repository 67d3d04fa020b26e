#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualcav::cli {

/// Configuration problem with a location; commands map it to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(msg), line(line) {}
    int line;
};

struct ConfigEntry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

/// One [section] instance, in file order. Repeated headers with the same path
/// create repeated instances (used for per-mode sections).
struct ConfigSection {
    std::string path;
    int line = 0;
    std::map<std::string, ConfigEntry> entries;
};

/// Sectioned key = value text with '#' comments. Keys carry explicit unit
/// suffixes by convention (length_m, power_w, freq_hz, ...).
class Config {
  public:
    static Config parse(const std::string& text, const std::string& origin = "<config>");
    static Config parse_file(const std::string& path);

    const std::string& text() const { return text_; }
    const std::string& origin() const { return origin_; }

    /// All section instances whose path matches exactly, in file order.
    std::vector<const ConfigSection*> sections(const std::string& path) const;
    /// The single instance of a section; throws when repeated; nullptr when absent.
    const ConfigSection* unique_section(const std::string& path) const;
    bool has_section(const std::string& path) const;

    // Typed getters on a section; missing key or bad value -> ConfigError.
    static double get_double(const ConfigSection& s, const std::string& key);
    static std::optional<double> get_double_opt(const ConfigSection& s, const std::string& key);
    static uint64_t get_u64(const ConfigSection& s, const std::string& key);
    static int get_int(const ConfigSection& s, const std::string& key);
    static std::optional<int> get_int_opt(const ConfigSection& s, const std::string& key);
    static std::string get_string(const ConfigSection& s, const std::string& key);
    static std::optional<std::string> get_string_opt(const ConfigSection& s,
                                                     const std::string& key);

    /// First key never touched by a getter, if any: typo detection.
    struct UnusedKey {
        std::string section;
        std::string key;
        int line;
    };
    std::optional<UnusedKey> first_unused() const;

  private:
    std::string text_;
    std::string origin_;
    std::vector<ConfigSection> sections_;
};

/// FNV-1a 64-bit digest of the raw config text, as fixed-width hex.
std::string fnv1a64_hex(const std::string& text);

}  // namespace dualcav::cli
