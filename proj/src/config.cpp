#include "hclab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "hclab/error.hpp"

namespace hclab {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
bool parse_exact(const std::string& text, T& out)
{
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source)
{
    Config cfg;
    cfg.source_ = source;
    std::string section;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty())
            continue;
        const std::string where = source + ":" + std::to_string(line) + ": ";
        if (text.front() == '[') {
            if (text.back() != ']' || text.size() < 3)
                fail(where + "malformed section header '" + text + "'");
            section = trim(text.substr(1, text.size() - 2));
            if (section != "model" && section != "run" && section != "output")
                fail(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            fail(where + "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty() || value.empty())
            fail(where + "empty key or value");
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.entries_.count(full))
            fail(where + "duplicate key '" + full + "' (first on line " + std::to_string(cfg.entries_[full].line) +
                 ")");
        cfg.entries_[full] = Entry{value, line, false};
    }
    return cfg;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail("cannot open config file '" + path + "'");
    return parse(in, path);
}

const Config::Entry& Config::find(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        fail(source_ + ": missing required key '" + key + "'");
    it->second.used = true;
    return it->second;
}

void Config::bad_value(const std::string& key, const Entry& e, const std::string& why) const
{
    fail(source_ + ":" + std::to_string(e.line) + ": bad value for '" + key + "': '" + e.value + "' (" + why + ")");
}

std::string Config::get_string(const std::string& key, const std::optional<std::string>& fallback) const
{
    if (!has(key) && fallback)
        return *fallback;
    return find(key).value;
}

double Config::get_double(const std::string& key, const std::optional<double>& fallback) const
{
    if (!has(key) && fallback)
        return *fallback;
    const Entry& e = find(key);
    double v = 0.0;
    if (!parse_exact(e.value, v) || !std::isfinite(v))
        bad_value(key, e, "expected a finite number");
    return v;
}

std::int64_t Config::get_int(const std::string& key, const std::optional<std::int64_t>& fallback) const
{
    if (!has(key) && fallback)
        return *fallback;
    const Entry& e = find(key);
    std::int64_t v = 0;
    if (!parse_exact(e.value, v)) {
        // Accept integral values written in floating form, e.g. 1e5.
        double d = 0.0;
        if (!parse_exact(e.value, d) || d != std::floor(d) || std::abs(d) > 9e15)
            bad_value(key, e, "expected an integer");
        v = static_cast<std::int64_t>(d);
    }
    return v;
}

std::uint64_t Config::get_u64(const std::string& key, const std::optional<std::uint64_t>& fallback) const
{
    if (!has(key) && fallback)
        return *fallback;
    const Entry& e = find(key);
    std::uint64_t v = 0;
    if (!parse_exact(e.value, v))
        bad_value(key, e, "expected an unsigned 64-bit integer");
    return v;
}

bool Config::get_bool(const std::string& key, const std::optional<bool>& fallback) const
{
    if (!has(key) && fallback)
        return *fallback;
    const Entry& e = find(key);
    if (e.value == "true" || e.value == "on" || e.value == "1")
        return true;
    if (e.value == "false" || e.value == "off" || e.value == "0")
        return false;
    bad_value(key, e, "expected true or false");
}

std::vector<double> Config::get_grid(const std::string& key) const
{
    const Entry& e = find(key);
    std::vector<double> out;
    auto number = [&](const std::string& s) {
        double v = 0.0;
        if (!parse_exact(trim(s), v) || !std::isfinite(v))
            bad_value(key, e, "grid entries must be finite numbers");
        return v;
    };
    if (e.value.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(e.value);
        std::string p;
        while (std::getline(ss, p, ':'))
            parts.push_back(p);
        if (parts.size() != 3)
            bad_value(key, e, "range grids are start:stop:step");
        const double a = number(parts[0]);
        const double b = number(parts[1]);
        const double step = number(parts[2]);
        if (!(step > 0.0) || b < a)
            bad_value(key, e, "need step > 0 and stop >= start");
        const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
        if (count > 100000)
            bad_value(key, e, "grid has more than 100000 points");
        for (long i = 0; i < count; ++i)
            out.push_back(a + static_cast<double>(i) * step);
    } else {
        std::stringstream ss(e.value);
        std::string p;
        while (std::getline(ss, p, ','))
            out.push_back(number(p));
    }
    if (out.empty())
        bad_value(key, e, "empty grid");
    return out;
}

void Config::reject_unused() const
{
    for (const auto& [key, e] : entries_)
        if (!e.used)
            fail(source_ + ":" + std::to_string(e.line) + ": unknown key '" + key + "' for this experiment");
}

std::vector<std::string> Config::canonical() const
{
    std::vector<std::string> out;
    for (const auto& [key, e] : entries_)
        out.push_back(key + "=" + e.value);
    return out;
}

std::uint64_t fnv1a(const std::string& data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace hclab
