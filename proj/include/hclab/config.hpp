#pragma once

// Experiment configuration files.
//
//   # comment
//   experiment = pd-curve        (optional; must match the CLI if present)
//   [model]
//   kappa = 0.005
//   [run]
//   lambdas = 0.05:0.6:0.05      (start:stop:step, or a comma list)
//
// Keys are addressed as "section.key". Every key must be consumed by the
// experiment that reads the file; leftovers are reported with their line.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hclab {

class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    static Config parse(std::istream& in, const std::string& source = "<config>");
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::optional<std::string>& fallback = std::nullopt) const;
    double get_double(const std::string& key, const std::optional<double>& fallback = std::nullopt) const;
    std::int64_t get_int(const std::string& key, const std::optional<std::int64_t>& fallback = std::nullopt) const;
    std::uint64_t get_u64(const std::string& key, const std::optional<std::uint64_t>& fallback = std::nullopt) const;
    bool get_bool(const std::string& key, const std::optional<bool>& fallback = std::nullopt) const;
    // "a:b:step" (inclusive of b up to round-off) or "x, y, z".
    std::vector<double> get_grid(const std::string& key) const;

    // Throws on the first entry no getter asked for.
    void reject_unused() const;

    // Sorted "key=value" lines; the basis of the cache key and metadata.
    std::vector<std::string> canonical() const;

    const std::string& source() const { return source_; }

private:
    const Entry& find(const std::string& key) const;
    [[noreturn]] void bad_value(const std::string& key, const Entry& e, const std::string& why) const;

    std::string source_;
    std::map<std::string, Entry> entries_;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& data);

}  // namespace hclab
