#include "cfbounds/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cfbounds {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    return d;
}

long long parse_integer(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long n = 0;
    try {
        n = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    return n;
}

std::uint64_t parse_seed(const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("seed must be a nonnegative integer, got '" + v + "'");
    }
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError("seed out of range: '" + v + "'");
    }
}

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"figure1", {"out", "tol", "periods", "sigma_x2", "rho", "time_effects", "mc_draws", "t_prime",
                     "include_target", "x"}},
        {"figure2", {"out", "tol", "periods", "mc_draws", "t_prime", "include_target"}},
        {"figure3", {"out", "tol", "groups", "periods", "categories", "t_prime", "lambda_bar", "eta_plus",
                     "eta_minus"}},
        {"figure4_detail", {"out", "tol", "groups", "periods", "categories", "lambda_bar", "eta_plus",
                            "eta_minus"}},
        {"figure5", {"out", "tol", "beta_step", "beta_max", "lambda2"}},
        {"figure6_time", {"out", "tol", "beta_step", "beta_max", "lambda2"}},
        {"bounds_query", {"out", "tol", "model", "table", "target", "x", "y", "t_prime", "residual_points"}},
    };
    return keys;
}

}  // namespace

std::uint64_t fnv1a(const std::string& data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

const std::vector<std::string>& ExperimentConfig::experiments() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& [k, v] : schema()) out.push_back(k);
        return out;
    }();
    return ids;
}

const std::vector<std::string>& ExperimentConfig::allowed_keys(const std::string& experiment) {
    const auto it = schema().find(experiment);
    if (it == schema().end()) throw ConfigError("unknown experiment '" + experiment + "'");
    return it->second;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    std::map<std::string, std::string> raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!raw.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    const auto exp = raw.find("experiment");
    if (exp == raw.end()) throw ConfigError("config is missing 'experiment'");
    const auto seed = raw.find("seed");
    if (seed == raw.end()) throw ConfigError("config is missing the mandatory 'seed'");

    ExperimentConfig cfg;
    cfg.experiment_ = exp->second;
    allowed_keys(cfg.experiment_);
    cfg.seed_ = parse_seed(seed->second);
    for (const auto& [k, v] : raw) {
        if (k == "experiment" || k == "seed") continue;
        cfg.set(k, v);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    const auto& keys = allowed_keys(experiment_);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError("unknown config key '" + key + "' for experiment '" + experiment_ + "'");
    }
    values_[key] = value;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const long long n = parse_integer(key, it->second);
    if (n < -2147483647LL || n > 2147483647LL) throw ConfigError("config key '" + key + "': integer out of range");
    return static_cast<int>(n);
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + it->second + "'");
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key, std::vector<double> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(it->second)) out.push_back(parse_double(key, item));
    return out;
}

std::vector<int> ExperimentConfig::get_ints(const std::string& key, std::vector<int> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<int> out;
    for (const auto& item : split_list(it->second)) {
        // Inclusive ranges like 5-20 are allowed alongside single values.
        const auto dash = item.find('-', 1);
        if (dash != std::string::npos) {
            const long long a = parse_integer(key, trim(item.substr(0, dash)));
            const long long b = parse_integer(key, trim(item.substr(dash + 1)));
            if (b < a) throw ConfigError("config key '" + key + "': empty range '" + item + "'");
            for (long long v = a; v <= b; ++v) out.push_back(static_cast<int>(v));
        } else {
            out.push_back(static_cast<int>(parse_integer(key, item)));
        }
    }
    return out;
}

std::string ExperimentConfig::canonical() const {
    std::map<std::string, std::string> all = values_;
    // The output path does not change the result.
    all.erase("out");
    all["experiment"] = experiment_;
    all["seed"] = std::to_string(seed_);
    std::string out;
    for (const auto& [k, v] : all) out += k + "=" + v + "\n";
    return out;
}

std::string ExperimentConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

}  // namespace cfbounds
