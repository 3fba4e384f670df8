#pragma once

// Experiment runners. Each turns a config into a table whose CSV rendering
// is byte-identical across reruns of the same config.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cfbounds/config.hpp"
#include "cfbounds/dgp.hpp"

namespace cfbounds {

class CsvTable {
public:
    using Value = std::variant<long long, double, std::string>;

    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::vector<Value> row);
    /// Extra `# ` lines written after the standard header.
    void add_comment(std::string line) { comments_.push_back(std::move(line)); }

    [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<std::vector<Value>>& rows() const noexcept { return rows_; }
    [[nodiscard]] const std::vector<std::string>& comments() const noexcept { return comments_; }
    [[nodiscard]] std::size_t column(const std::string& name) const;
    /// Numeric cell (integer or real) as a double.
    [[nodiscard]] double number(std::size_t row, const std::string& name) const;
    [[nodiscard]] const std::string& text(std::size_t row, const std::string& name) const;

    /// Header comments (experiment, seed, config hash, extras), the column
    /// line and one line per row. Reals use 12 significant digits.
    [[nodiscard]] std::string render(const ExperimentConfig& cfg) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Value>> rows_;
    std::vector<std::string> comments_;
};

/// Threshold draw from the seed, with any of lambda_bar (values for periods
/// 2..T), eta_plus and eta_minus taken from the config instead.
[[nodiscard]] ThresholdDraw threshold_draw_from_config(const ExperimentConfig& cfg, int periods);

/// Columns t, t_prime, truth, lower, upper, width, stderr_truth, stderr_lower, stderr_upper.
[[nodiscard]] CsvTable run_figure1(const ExperimentConfig& cfg);
/// Figure 1 schema with a leading panel column: baseline, x1, no_time_effects,
/// rho0, sigma_quarter, sigma_four.
[[nodiscard]] CsvTable run_figure2(const ExperimentConfig& cfg);
/// Columns J, t_prime, truth, lower, upper, width.
[[nodiscard]] CsvTable run_figure3(const ExperimentConfig& cfg);
/// Columns group, s, truth, lower, upper, trivial ([0, 1]) and one_sided
/// (exactly one endpoint informative).
[[nodiscard]] CsvTable run_figure4_detail(const ExperimentConfig& cfg);
/// Columns lambda2, beta, t, truth, lower, upper (t = 1).
[[nodiscard]] CsvTable run_figure5(const ExperimentConfig& cfg);
/// As run_figure5 for t = 1 and t = 2.
[[nodiscard]] CsvTable run_figure6_time(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment() to one of the figure runners.
[[nodiscard]] CsvTable run_experiment(const ExperimentConfig& cfg);

/// Mean of (upper - lower) over rows whose `key` column equals `value`.
[[nodiscard]] double mean_width(const CsvTable& table, const std::string& key, double value);

/// The grid k * step for k = 0..round(max / step).
[[nodiscard]] std::vector<double> beta_grid(double step, double max);

/// JSON report for a user-supplied model (or candidate set) and survival
/// table, read from the files named by the config's `model` and `table` keys.
[[nodiscard]] std::string run_bounds_query(const ExperimentConfig& cfg);
/// Same, from the JSON documents themselves.
[[nodiscard]] std::string bounds_query_json(const std::string& model_json, const std::string& table_json,
                                            const ExperimentConfig& cfg);

}  // namespace cfbounds
