#pragma once

// Flat experiment configuration: one `key = value` per line, `#` starts a
// comment. Every config names its experiment and carries a seed.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfbounds {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ExperimentConfig {
public:
    /// Parses text; throws ConfigError on syntax errors, duplicate or unknown
    /// keys, an unknown experiment or a missing seed.
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    [[nodiscard]] const std::string& experiment() const noexcept { return experiment_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    /// Sets a key after validating it against the experiment's schema.
    void set(const std::string& key, const std::string& value);

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] int get_int(const std::string& key, int fallback) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
    [[nodiscard]] std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
    [[nodiscard]] std::vector<int> get_ints(const std::string& key, std::vector<int> fallback) const;

    /// Canonical `key=value` lines (sorted, seed included, output path excluded).
    [[nodiscard]] std::string canonical() const;
    /// FNV-1a hash of canonical(), as 16 hex digits.
    [[nodiscard]] std::string hash() const;

    /// Keys accepted by an experiment, besides `experiment` and `seed`.
    static const std::vector<std::string>& allowed_keys(const std::string& experiment);
    static const std::vector<std::string>& experiments();

private:
    std::string experiment_;
    std::uint64_t seed_ = 0;
    std::map<std::string, std::string> values_;
};

[[nodiscard]] std::uint64_t fnv1a(const std::string& data) noexcept;

}  // namespace cfbounds
