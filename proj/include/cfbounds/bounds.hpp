#pragma once

// Bounds on the counterfactual survival probability
//   tau_{t,x,y}(X) = P(Y_t(x) >= y | X)
// obtained by comparing, for every observed (s, y'), the observed index
// X_s b - h_s^-(y') with the counterfactual index x b - h_t^-(y). An observed
// probability P(Y_s >= y' | X) is a lower bound on tau when its index is at
// most the counterfactual one, an upper bound when it is at least, and
// both (point identification) on a tie.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfbounds/extended_real.hpp"
#include "cfbounds/link.hpp"

namespace cfbounds {

using Regressor = std::vector<double>;

/// Coefficients plus one link per period (periods are 1-based).
class ModelSpec {
public:
    ModelSpec(std::vector<double> beta, std::vector<LinkFunction> links);

    [[nodiscard]] int periods() const noexcept { return static_cast<int>(links_.size()); }
    [[nodiscard]] std::size_t dimension() const noexcept { return beta_.size(); }
    [[nodiscard]] const std::vector<double>& beta() const noexcept { return beta_; }
    [[nodiscard]] const std::vector<LinkFunction>& links() const noexcept { return links_; }
    [[nodiscard]] const LinkFunction& link(int period) const;
    /// Outcome support shared by all periods.
    [[nodiscard]] const OutcomeSupport& support() const noexcept { return links_.front().support(); }

    /// x . beta
    [[nodiscard]] double index(const Regressor& x) const;

private:
    std::vector<double> beta_;
    std::vector<LinkFunction> links_;
};

/// Observed regressors X_1..X_T of one unit or cell.
class RegressorSequence {
public:
    RegressorSequence() = default;
    explicit RegressorSequence(std::vector<Regressor> values);
    /// Scalar regressor per period.
    static RegressorSequence scalar(const std::vector<double>& values);

    [[nodiscard]] int periods() const noexcept { return static_cast<int>(values_.size()); }
    [[nodiscard]] const Regressor& at(int period) const;
    [[nodiscard]] const std::vector<Regressor>& values() const noexcept { return values_; }

    friend bool operator==(const RegressorSequence&, const RegressorSequence&) = default;

private:
    std::vector<Regressor> values_;
};

struct CounterfactualQuery {
    int t = 1;
    Regressor x;
    double y = 1.0;
};

/// Conditional survival probabilities P(Y_s >= y' | X) for y' above the
/// support's infimum. Finite supports store a row per period aligned with
/// outcomes(); continuous supports hold an evaluable function.
class SurvivalTable {
public:
    using Function = std::function<double(int period, double outcome)>;

    SurvivalTable(std::vector<double> outcomes, std::vector<std::vector<double>> rows);
    SurvivalTable(int periods, Function fn);

    [[nodiscard]] int periods() const noexcept { return periods_; }
    [[nodiscard]] bool is_finite() const noexcept { return !fn_; }
    [[nodiscard]] const std::vector<double>& outcomes() const noexcept { return outcomes_; }
    [[nodiscard]] const std::vector<double>& row(int period) const;
    [[nodiscard]] double probability(int period, double outcome) const;

    /// Descriptions of entries that increase in y' (finite tables only).
    [[nodiscard]] std::vector<std::string> monotonicity_violations() const;

private:
    int periods_ = 0;
    std::vector<double> outcomes_;
    std::vector<std::vector<double>> rows_;
    Function fn_;
};

struct Witness {
    int period = 0;
    double outcome = 0.0;
    friend bool operator==(const Witness&, const Witness&) = default;
};

inline constexpr double kRoundingSlack = 1e-12;

struct BoundInterval {
    double lower = 0.0;
    double upper = 1.0;
    bool point_identified = false;
    /// lower > upper, only possible with estimated probabilities. Gaps up to
    /// kRoundingSlack are rounding in exact tables and collapse to their midpoint.
    bool crossed = false;
    std::optional<Witness> lower_witness;
    std::optional<Witness> upper_witness;

    [[nodiscard]] double width() const noexcept { return upper - lower; }
    [[nodiscard]] bool contains(double tau, double slack = 0.0) const noexcept {
        return lower - slack <= tau && tau <= upper + slack;
    }
};

enum class IndexComparison { Lower, Upper, Both };

std::string to_string(IndexComparison c);

struct BoundOptions {
    /// Index ties within tol are classified Both.
    double tol = 0.0;
    /// Periods used by the cross-period bounds; empty means all periods.
    std::vector<int> periods;
    /// Extra y' > inf(support) evaluated on continuous supports.
    std::vector<double> continuous_grid;
    /// y' = inf(support) + limit_epsilon stands in for the limit y' -> inf.
    double limit_epsilon = 1e-6;
};

/// Periods 1..count, plus target when include_target is set.
std::vector<int> first_periods(int count, int target, bool include_target);

struct ClassifiedPair {
    int period = 0;
    double outcome = 0.0;
    ExtendedReal observed;
    IndexComparison comparison = IndexComparison::Both;
    double probability = 0.0;
};

/// x . beta - h_t^-(y)
[[nodiscard]] ExtendedReal counterfactual_index(const ModelSpec& model, const CounterfactualQuery& q);

/// X_s . beta - h_s^-(y')
[[nodiscard]] ExtendedReal observed_index(const ModelSpec& model, const RegressorSequence& X,
                                          int period, double outcome);

[[nodiscard]] IndexComparison classify(const ExtendedReal& observed, const ExtendedReal& counterfactual,
                                       double tol = 0.0);

/// y' values examined in period s: the support above its infimum when it is
/// finite; otherwise the attaining point (if any), the grid and the limit point.
[[nodiscard]] std::vector<double> candidate_outcomes(const ModelSpec& model, const RegressorSequence& X,
                                                     const CounterfactualQuery& q, int period,
                                                     const BoundOptions& opts);

/// Classification of every (s, y') pair over the given periods.
[[nodiscard]] std::vector<ClassifiedPair> classify_pairs(const ModelSpec& model, const RegressorSequence& X,
                                                         const CounterfactualQuery& q,
                                                         const SurvivalTable& probs,
                                                         const std::vector<int>& periods,
                                                         const BoundOptions& opts);

/// Same-period bounds; no time-stationarity needed.
[[nodiscard]] BoundInterval theorem1_bounds(const ModelSpec& model, const RegressorSequence& X,
                                            const CounterfactualQuery& q, const SurvivalTable& probs,
                                            const BoundOptions& opts = {});

/// Cross-period bounds under conditional time-stationarity of the errors.
/// Valid only when that assumption holds for the data-generating process.
[[nodiscard]] BoundInterval theorem2_bounds(const ModelSpec& model, const RegressorSequence& X,
                                            const CounterfactualQuery& q, const SurvivalTable& probs,
                                            const BoundOptions& opts = {});

/// One interval per period in opts.periods (all periods by default), each
/// built from that period's observations alone.
[[nodiscard]] std::vector<BoundInterval> per_period_bounds(const ModelSpec& model, const RegressorSequence& X,
                                                           const CounterfactualQuery& q,
                                                           const SurvivalTable& probs,
                                                           const BoundOptions& opts = {});

/// Intersection of intervals; witnesses follow the first attaining interval.
[[nodiscard]] BoundInterval intersect(const std::vector<BoundInterval>& intervals);

/// Envelope of theorem2_bounds across candidate parameter values. A single
/// table is shared by all candidates; otherwise one table per candidate.
[[nodiscard]] BoundInterval worst_case_bounds(const std::vector<ModelSpec>& candidates,
                                              const RegressorSequence& X, const CounterfactualQuery& q,
                                              const std::vector<SurvivalTable>& probs,
                                              const BoundOptions& opts = {});

struct MomentResidual {
    int period = 0;
    double outcome = 0.0;
    double residual = 0.0;
    /// The index difference was infinite; residual holds sign * (P - tau).
    bool infinite_index = false;
};

/// (obs_index - cf_index) * (P(Y_s >= y' | X) - tau) for every (s, y').
/// tau is consistent with the restrictions iff every residual is >= 0.
[[nodiscard]] std::vector<MomentResidual> moment_inequality_residuals(
    const ModelSpec& model, const RegressorSequence& X, const CounterfactualQuery& q,
    const SurvivalTable& probs, double tau, const BoundOptions& opts = {});

}  // namespace cfbounds
