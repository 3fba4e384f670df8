#pragma once

// Conditional survival probabilities for designs whose law of U - alpha
// given X is known. Every event {Y_s >= y'} equals
// {U_s - alpha <= X_s b - h_s^-(y')}, so each entry is a CDF evaluation.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "cfbounds/bounds.hpp"
#include "cfbounds/extended_real.hpp"

namespace cfbounds {

[[nodiscard]] double normal_cdf(double z) noexcept;
[[nodiscard]] double normal_pdf(double z) noexcept;
[[nodiscard]] double logistic_cdf(double z) noexcept;

/// U - alpha ~ N(mean, variance).
struct GaussianConvolution {
    double mean = 0.0;
    double variance = 1.0;
};

/// U standard logistic, alpha ~ N(normal_mean, normal_variance) independent.
struct LogisticNormalMixture {
    double normal_mean = 0.0;
    double normal_variance = 1.0;
    int nodes = 64;
};

/// U standard normal, alpha discrete with P(alpha = alpha[k]) = weights[k].
/// Represents quadrature-discretized fixed-effect laws.
struct ProbitFixedEffectMixture {
    std::vector<double> alpha;
    std::vector<double> weights;
};

using LatentShiftDistribution = std::variant<GaussianConvolution, LogisticNormalMixture, ProbitFixedEffectMixture>;

/// Throws std::invalid_argument on a degenerate or malformed law.
void validate(const LatentShiftDistribution& dist);

/// P(U - alpha <= c | X); 0 at NEG_INF and 1 at POS_INF.
[[nodiscard]] double survival_cdf(const LatentShiftDistribution& dist, const ExtendedReal& c);

/// Entry (s, y') = survival_cdf(dist, observed_index(s, y')). Continuous
/// supports yield an evaluable table.
[[nodiscard]] SurvivalTable exact_survival_table(const ModelSpec& model, const RegressorSequence& X,
                                                 const LatentShiftDistribution& dist);

/// tau_{t,x,y}(X) = survival_cdf(dist, counterfactual_index(q)).
[[nodiscard]] double true_tau(const ModelSpec& model, const CounterfactualQuery& q,
                              const LatentShiftDistribution& dist);

/// Pool-adjacent-violators fit of a nonincreasing sequence (weighted least squares).
[[nodiscard]] std::vector<double> isotonic_nonincreasing(const std::vector<double>& values,
                                                         const std::vector<double>& weights);

struct EstimatedSurvival {
    SurvivalTable table;
    /// Number of observations behind each period's row.
    std::vector<std::size_t> sample_size;
    /// Human-readable notes for every row that needed repair.
    std::vector<std::string> repairs;
};

/// Repairs each row of a finite table into a nonincreasing sequence.
[[nodiscard]] EstimatedSurvival repair_monotonicity(const SurvivalTable& table,
                                                    std::vector<std::size_t> sample_size = {});

/// Empirical frequencies of {Y_s >= y'} over the units of one regressor cell.
/// outcomes[i][s-1] is unit i's period-s outcome. Throws std::runtime_error on
/// an empty cell.
[[nodiscard]] EstimatedSurvival mc_survival_table(const std::vector<std::vector<double>>& outcomes,
                                                  const std::vector<double>& lower_outcomes);

}  // namespace cfbounds
