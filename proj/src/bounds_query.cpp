#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "cfbounds/experiments.hpp"
#include "cfbounds/probability.hpp"

namespace cfbounds {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) {
    throw std::invalid_argument("bounds_query schema: " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) schema_error(where + " needs field '" + key + "'");
    return obj.at(key);
}

std::vector<double> real_array(const json& j, const std::string& where) {
    if (!j.is_array()) schema_error(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) schema_error(where + " must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

LinkFunction parse_link(const json& j, const std::string& where) {
    const json& kind = require(j, "kind", where);
    if (!kind.is_string()) schema_error(where + ".kind must be a string");
    const std::string k = kind.get<std::string>();
    if (k == "binary_threshold") return LinkFunction::binary_threshold(require(j, "threshold", where).get<double>());
    if (k == "ordered_thresholds") {
        return LinkFunction::ordered_thresholds(real_array(require(j, "thresholds", where), where + ".thresholds"));
    }
    if (k == "censored_at_zero") return LinkFunction::censored_at_zero();
    if (k == "affine_invertible") return LinkFunction::affine_invertible(require(j, "shift", where).get<double>());
    if (k == "tabulated") {
        return LinkFunction::tabulated(real_array(require(j, "breakpoints", where), where + ".breakpoints"),
                                       real_array(require(j, "values", where), where + ".values"));
    }
    schema_error(where + ".kind '" + k + "' is not a known link");
}

ModelSpec parse_model(const json& j, const std::string& where) {
    std::vector<double> beta = real_array(require(j, "beta", where), where + ".beta");
    const json& links = require(j, "links", where);
    if (!links.is_array() || links.empty()) schema_error(where + ".links must be a nonempty array");
    std::vector<LinkFunction> parsed;
    for (std::size_t i = 0; i < links.size(); ++i) {
        parsed.push_back(parse_link(links[i], where + ".links[" + std::to_string(i) + "]"));
    }
    return {std::move(beta), std::move(parsed)};
}

std::vector<ModelSpec> parse_candidates(const json& j) {
    std::vector<ModelSpec> out;
    if (j.is_object() && j.contains("candidates")) {
        const json& c = j.at("candidates");
        if (!c.is_array() || c.empty()) schema_error("candidates must be a nonempty array");
        for (std::size_t i = 0; i < c.size(); ++i) out.push_back(parse_model(c[i], "candidates[" + std::to_string(i) + "]"));
    } else {
        out.push_back(parse_model(j, "model"));
    }
    for (const auto& m : out) {
        if (m.periods() != out.front().periods() || m.dimension() != out.front().dimension() ||
            !(m.support() == out.front().support())) {
            schema_error("candidates must share T, the dimension of beta and the outcome support");
        }
    }
    return out;
}

RegressorSequence parse_regressors(const json& j, std::size_t dim) {
    if (!j.is_array() || j.empty()) schema_error("regressors must be a nonempty array");
    std::vector<Regressor> values;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].is_number()) {
            values.push_back({j[i].get<double>()});
        } else {
            values.push_back(real_array(j[i], "regressors[" + std::to_string(i) + "]"));
        }
        if (values.back().size() != dim) schema_error("regressors must match the dimension of beta");
    }
    return RegressorSequence(std::move(values));
}

json witness_json(const std::optional<Witness>& w) {
    if (!w) return "none";
    return {{"period", w->period}, {"outcome", w->outcome}};
}

json interval_json(const BoundInterval& b) {
    return {{"lower", b.lower},
            {"upper", b.upper},
            {"point_identified", b.point_identified},
            {"crossed", b.crossed},
            {"witnesses", {{"lower", witness_json(b.lower_witness)}, {"upper", witness_json(b.upper_witness)}}}};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string bounds_query_json(const std::string& model_json, const std::string& table_json,
                              const ExperimentConfig& cfg) {
    json mj;
    json tj;
    try {
        mj = json::parse(model_json);
        tj = json::parse(table_json);
    } catch (const json::parse_error& e) {
        schema_error(std::string("malformed JSON: ") + e.what());
    }
    const std::vector<ModelSpec> candidates = parse_candidates(mj);
    const ModelSpec& model = candidates.front();
    if (!model.support().is_finite()) schema_error("only finite outcome supports are accepted");

    const RegressorSequence X = parse_regressors(require(tj, "regressors", "table"), model.dimension());
    if (X.periods() != model.periods()) schema_error("regressors must cover every model period");
    const std::vector<double> outcomes = real_array(require(tj, "outcomes", "table"), "table.outcomes");
    const json& rows_j = require(tj, "rows", "table");
    if (!rows_j.is_array()) schema_error("table.rows must be an array");
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < rows_j.size(); ++s) rows.push_back(real_array(rows_j[s], "table.rows[" + std::to_string(s) + "]"));
    if (outcomes != model.support().lower_points()) {
        schema_error("table.outcomes must list the support above its infimum");
    }
    std::vector<std::size_t> sample_size;
    if (tj.contains("sample_size")) {
        for (double n : real_array(tj.at("sample_size"), "table.sample_size")) sample_size.push_back(static_cast<std::size_t>(n));
    }
    const SurvivalTable raw(outcomes, std::move(rows));
    if (raw.periods() != model.periods()) schema_error("table.rows must have one row per period");
    const std::vector<std::string> violations = raw.monotonicity_violations();
    const EstimatedSurvival repaired = repair_monotonicity(raw, sample_size);
    const SurvivalTable& probs = repaired.table;

    CounterfactualQuery q;
    q.t = cfg.get_int("target", 1);
    q.x = cfg.get_doubles("x", std::vector<double>(model.dimension(), 0.0));
    q.y = cfg.get_double("y", outcomes.front());
    if (q.x.size() != model.dimension()) throw ConfigError("x must have one entry per coefficient");

    BoundOptions opts;
    opts.tol = cfg.get_double("tol", 0.0);
    if (cfg.has("t_prime")) {
        const std::vector<int> tp = cfg.get_ints("t_prime", {});
        if (tp.size() != 1) throw ConfigError("t_prime takes a single value for bounds_query");
        if (tp.front() < 1 || tp.front() > model.periods()) throw ConfigError("t_prime outside 1..T");
        opts.periods = first_periods(tp.front(), q.t, false);
    }
    const int points = cfg.get_int("residual_points", 11);
    if (points < 2) throw ConfigError("residual_points must be at least 2");

    const BoundInterval t2 = theorem2_bounds(model, X, q, probs, opts);
    const BoundInterval t1 = theorem1_bounds(model, X, q, probs, opts);
    const auto per = per_period_bounds(model, X, q, probs, opts);
    const BoundInterval worst = worst_case_bounds(candidates, X, q, {probs}, opts);

    json out;
    out["query"] = {{"t", q.t}, {"x", q.x}, {"y", q.y}};
    out["interval"] = {{"lower", t2.lower}, {"upper", t2.upper}, {"point_identified", t2.point_identified},
                       {"crossed", t2.crossed}};
    out["witnesses"] = {{"lower", witness_json(t2.lower_witness)}, {"upper", witness_json(t2.upper_witness)}};
    out["theorem1"] = interval_json(t1);
    json pp = json::array();
    const std::vector<int> used = opts.periods.empty() ? first_periods(model.periods(), q.t, false) : opts.periods;
    for (std::size_t i = 0; i < per.size(); ++i) {
        json e = interval_json(per[i]);
        e["period"] = used[i];
        pp.push_back(e);
    }
    out["per_period"] = pp;
    out["worst_case"] = interval_json(worst);
    out["worst_case"]["candidates"] = candidates.size();

    json pairs = json::array();
    for (const auto& p : classify_pairs(model, X, q, probs, used, opts)) {
        pairs.push_back({{"period", p.period},
                         {"outcome", p.outcome},
                         {"comparison", to_string(p.comparison)},
                         {"probability", p.probability}});
    }
    out["pairs"] = pairs;

    json residuals = json::array();
    for (int k = 0; k < points; ++k) {
        const double tau = static_cast<double>(k) / (points - 1);
        json values = json::array();
        bool consistent = true;
        for (const auto& r : moment_inequality_residuals(model, X, q, probs, tau, opts)) {
            values.push_back({{"period", r.period}, {"outcome", r.outcome}, {"residual", r.residual}});
            consistent = consistent && r.residual >= 0.0;
        }
        residuals.push_back({{"tau", tau}, {"consistent", consistent}, {"values", values}});
    }
    out["residuals"] = residuals;
    out["monotonicity_violations"] = violations;
    out["repairs"] = repaired.repairs;
    return out.dump(2) + "\n";
}

std::string run_bounds_query(const ExperimentConfig& cfg) {
    if (cfg.experiment() != "bounds_query") {
        throw ConfigError("config is for experiment '" + cfg.experiment() + "', expected 'bounds_query'");
    }
    if (!cfg.has("model") || !cfg.has("table")) throw ConfigError("bounds_query needs 'model' and 'table' paths");
    return bounds_query_json(read_file(cfg.get_string("model", "")), read_file(cfg.get_string("table", "")), cfg);
}

}  // namespace cfbounds
