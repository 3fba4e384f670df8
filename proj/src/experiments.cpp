#include "cfbounds/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "cfbounds/aggregate.hpp"

namespace cfbounds {

namespace {

std::string format_real(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
    return out;
}

BoundOptions bound_options(const ExperimentConfig& cfg) {
    BoundOptions opts;
    opts.tol = cfg.get_double("tol", 1e-9);
    if (!(opts.tol >= 0.0)) throw ConfigError("tol must be nonnegative");
    return opts;
}

std::vector<int> horizons(const ExperimentConfig& cfg, int lo, int periods) {
    std::vector<int> def;
    for (int h = lo; h <= periods; ++h) def.push_back(h);
    std::vector<int> out = cfg.get_ints("t_prime", def);
    if (out.empty()) throw ConfigError("t_prime must list at least one horizon");
    for (int h : out) {
        if (h < 1 || h > periods) {
            throw ConfigError("t_prime " + std::to_string(h) + " outside 1.." + std::to_string(periods));
        }
    }
    return out;
}

std::size_t mc_draws(const ExperimentConfig& cfg) {
    const int m = cfg.get_int("mc_draws", 100000);
    if (m < 2) throw ConfigError("mc_draws must be at least 2");
    return static_cast<std::size_t>(m);
}

const std::vector<std::string> kPathColumns = {"t",      "t_prime",      "truth",        "lower",       "upper",
                                               "width",  "stderr_truth", "stderr_lower", "stderr_upper"};

std::vector<CsvTable::Value> path_row(const SweepCell& c) {
    return {static_cast<long long>(c.target), static_cast<long long>(c.horizon), c.bound.truth.value_or(NAN),
            c.bound.lower, c.bound.upper, c.bound.width(), c.bound.stderr_truth, c.bound.stderr_lower,
            c.bound.stderr_upper};
}

std::vector<SweepCell> probit_sweep(const ProbitContinuousDesign& design, double x, const ExperimentConfig& cfg,
                                    int horizon_lo) {
    const auto pop = probit_design_population(design, mc_draws(cfg), cfg.seed());
    std::vector<int> targets;
    for (int t = 1; t <= design.periods; ++t) targets.push_back(t);
    return counterfactual_sweep(*pop, {x}, 1.0, targets, horizons(cfg, horizon_lo, design.periods),
                                cfg.get_bool("include_target", true), bound_options(cfg));
}

void require_experiment(const ExperimentConfig& cfg, const std::string& id) {
    if (cfg.experiment() != id) {
        throw ConfigError("config is for experiment '" + cfg.experiment() + "', expected '" + id + "'");
    }
}

int positive(const ExperimentConfig& cfg, const std::string& key, int fallback) {
    const int v = cfg.get_int(key, fallback);
    if (v < 1) throw ConfigError(key + " must be positive");
    return v;
}

void describe_draw(CsvTable& table, const ThresholdDraw& d) {
    std::vector<double> tail(d.center.begin() + 1, d.center.end());
    table.add_comment("eta_plus=" + format_real(d.eta_plus));
    table.add_comment("eta_minus=" + format_real(d.eta_minus));
    table.add_comment("lambda_bar=" + join(tail));
}

CsvTable ate_table(const ExperimentConfig& cfg, const std::vector<int>& periods) {
    const double step = cfg.get_double("beta_step", 0.05);
    const double max = cfg.get_double("beta_max", 2.0);
    const std::vector<double> lambdas = cfg.get_doubles("lambda2", {0.0, 0.5, 1.0});
    const BoundOptions opts = bound_options(cfg);
    CsvTable table({"lambda2", "beta", "t", "truth", "lower", "upper"});
    for (double l2 : lambdas) {
        for (double beta : beta_grid(step, max)) {
            const auto pop = discrete_design_population(DiscreteProbitDesign{beta, l2});
            for (int t : periods) {
                const PopulationBound b = ate_bounds(*pop, t, {1.0}, {0.0}, 1.0, opts);
                table.add_row({l2, beta, static_cast<long long>(t), b.truth.value_or(NAN), b.lower, b.upper});
            }
        }
    }
    return table;
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("CsvTable: no columns");
}

void CsvTable::add_row(std::vector<Value> row) {
    if (row.size() != columns_.size()) throw std::invalid_argument("CsvTable: row width does not match columns");
    rows_.push_back(std::move(row));
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) throw std::out_of_range("CsvTable: no column '" + name + "'");
    return static_cast<std::size_t>(it - columns_.begin());
}

double CsvTable::number(std::size_t row, const std::string& name) const {
    const Value& v = rows_.at(row).at(column(name));
    if (const auto* i = std::get_if<long long>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw std::invalid_argument("CsvTable: column '" + name + "' is not numeric");
}

const std::string& CsvTable::text(std::size_t row, const std::string& name) const {
    return std::get<std::string>(rows_.at(row).at(column(name)));
}

std::string CsvTable::render(const ExperimentConfig& cfg) const {
    std::ostringstream os;
    os << "# experiment=" << cfg.experiment() << "\n";
    os << "# seed=" << cfg.seed() << "\n";
    os << "# config_hash=" << cfg.hash() << "\n";
    for (const auto& c : comments_) os << "# " << c << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            std::visit(
                [&os](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        os << format_real(v);
                    } else {
                        os << v;
                    }
                },
                row[i]);
        }
        os << "\n";
    }
    return os.str();
}

ThresholdDraw threshold_draw_from_config(const ExperimentConfig& cfg, int periods) {
    ThresholdDraw d = draw_staggered_thresholds(periods, cfg.seed());
    if (cfg.has("lambda_bar")) {
        const std::vector<double> tail = cfg.get_doubles("lambda_bar", {});
        if (static_cast<int>(tail.size()) != periods - 1) {
            throw ConfigError("lambda_bar needs " + std::to_string(periods - 1) + " values (periods 2.." +
                              std::to_string(periods) + ")");
        }
        std::copy(tail.begin(), tail.end(), d.center.begin() + 1);
    }
    d.eta_plus = cfg.get_double("eta_plus", d.eta_plus);
    d.eta_minus = cfg.get_double("eta_minus", d.eta_minus);
    return d;
}

CsvTable run_figure1(const ExperimentConfig& cfg) {
    require_experiment(cfg, "figure1");
    ProbitContinuousDesign design;
    design.periods = positive(cfg, "periods", 20);
    design.sigma_x2 = cfg.get_double("sigma_x2", 1.0);
    design.rho = cfg.get_double("rho", 0.5);
    design.time_effects = cfg.get_bool("time_effects", true);
    design.validate();
    CsvTable table(kPathColumns);
    for (const auto& c : probit_sweep(design, cfg.get_double("x", 0.0), cfg, std::min(5, design.periods))) {
        table.add_row(path_row(c));
    }
    return table;
}

CsvTable run_figure2(const ExperimentConfig& cfg) {
    require_experiment(cfg, "figure2");
    const int periods = positive(cfg, "periods", 8);
    struct Panel {
        std::string name;
        ProbitContinuousDesign design;
        double x;
    };
    const std::vector<Panel> panels = {
        {"baseline", {periods, 1.0, 0.5, true}, 0.0},       {"x1", {periods, 1.0, 0.5, true}, 1.0},
        {"no_time_effects", {periods, 1.0, 0.5, false}, 0.0}, {"rho0", {periods, 1.0, 0.0, true}, 0.0},
        {"sigma_quarter", {periods, 0.25, 0.5, true}, 0.0},  {"sigma_four", {periods, 4.0, 0.5, true}, 0.0},
    };
    std::vector<std::string> columns = {"panel"};
    columns.insert(columns.end(), kPathColumns.begin(), kPathColumns.end());
    CsvTable table(columns);
    for (const auto& p : panels) {
        for (const auto& c : probit_sweep(p.design, p.x, cfg, 1)) {
            std::vector<CsvTable::Value> row = {p.name};
            auto rest = path_row(c);
            row.insert(row.end(), rest.begin(), rest.end());
            table.add_row(std::move(row));
        }
    }
    return table;
}

CsvTable run_figure3(const ExperimentConfig& cfg) {
    require_experiment(cfg, "figure3");
    const int periods = positive(cfg, "periods", 20);
    const int groups = positive(cfg, "groups", 19);
    const ThresholdDraw draw = threshold_draw_from_config(cfg, periods);
    const std::vector<int> hs = horizons(cfg, std::min(5, periods), periods);
    CsvTable table({"J", "t_prime", "truth", "lower", "upper", "width"});
    describe_draw(table, draw);
    for (int J : cfg.get_ints("categories", {2, 4, 6, 8})) {
        const StaggeredDesign design{groups, J, draw};
        const auto pop = staggered_design_population(design);
        const auto cells = counterfactual_sweep(*pop, {1.0}, design.top_half_start(), {1}, hs, true,
                                                bound_options(cfg));
        for (const auto& c : cells) {
            table.add_row({static_cast<long long>(J), static_cast<long long>(c.horizon), c.bound.truth.value_or(NAN),
                           c.bound.lower, c.bound.upper, c.bound.width()});
        }
    }
    return table;
}

CsvTable run_figure4_detail(const ExperimentConfig& cfg) {
    require_experiment(cfg, "figure4_detail");
    const int periods = positive(cfg, "periods", 8);
    const StaggeredDesign design{positive(cfg, "groups", 6), cfg.get_int("categories", 4),
                                 threshold_draw_from_config(cfg, periods)};
    const ModelSpec model = design.model();
    const CounterfactualQuery q{1, {1.0}, static_cast<double>(design.top_half_start())};
    CsvTable table({"group", "s", "truth", "lower", "upper", "trivial", "one_sided"});
    describe_draw(table, design.draw);
    for (int g = 1; g <= design.groups; ++g) {
        const RegressorSequence X = design.regressors(g);
        const LatentShiftDistribution law = design.latent_law(g);
        const SurvivalTable probs = exact_survival_table(model, X, law);
        const double truth = true_tau(model, q, law);
        const auto per = per_period_bounds(model, X, q, probs, bound_options(cfg));
        for (int s = 1; s <= periods; ++s) {
            const BoundInterval& b = per[static_cast<std::size_t>(s - 1)];
            const bool trivial = b.lower == 0.0 && b.upper == 1.0;
            const bool one_sided = !trivial && (b.lower == 0.0 || b.upper == 1.0);
            table.add_row({static_cast<long long>(g), static_cast<long long>(s), truth, b.lower, b.upper,
                           static_cast<long long>(trivial), static_cast<long long>(one_sided)});
        }
    }
    return table;
}

CsvTable run_figure5(const ExperimentConfig& cfg) {
    require_experiment(cfg, "figure5");
    return ate_table(cfg, {1});
}

CsvTable run_figure6_time(const ExperimentConfig& cfg) {
    require_experiment(cfg, "figure6_time");
    return ate_table(cfg, {1, 2});
}

CsvTable run_experiment(const ExperimentConfig& cfg) {
    const std::string& id = cfg.experiment();
    if (id == "figure1") return run_figure1(cfg);
    if (id == "figure2") return run_figure2(cfg);
    if (id == "figure3") return run_figure3(cfg);
    if (id == "figure4_detail") return run_figure4_detail(cfg);
    if (id == "figure5") return run_figure5(cfg);
    if (id == "figure6_time") return run_figure6_time(cfg);
    throw ConfigError("experiment '" + id + "' does not produce a CSV table");
}

double mean_width(const CsvTable& table, const std::string& key, double value) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < table.rows().size(); ++r) {
        if (table.number(r, key) != value) continue;
        sum += table.number(r, "upper") - table.number(r, "lower");
        ++n;
    }
    if (n == 0) throw std::invalid_argument("mean_width: no rows with " + key + " = " + format_real(value));
    return sum / static_cast<double>(n);
}

std::vector<double> beta_grid(double step, double max) {
    if (!(step > 0.0) || !(max >= 0.0)) throw ConfigError("beta grid needs step > 0 and max >= 0");
    const auto n = static_cast<long long>(std::llround(max / step));
    // Dividing by an integral 1/step keeps points like 0.5 and 1 exact.
    const double inv = std::round(1.0 / step);
    const bool integral = std::abs(inv * step - 1.0) < 1e-12;
    std::vector<double> out;
    for (long long k = 0; k <= n; ++k) {
        out.push_back(integral ? static_cast<double>(k) / inv : static_cast<double>(k) * step);
    }
    return out;
}

}  // namespace cfbounds
