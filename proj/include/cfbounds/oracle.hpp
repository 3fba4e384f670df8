#pragma once

// Brute-force verification layer for small instances. Index comparisons are
// redone in exact rational arithmetic (instances use dyadic rationals, which
// doubles represent exactly), generalized inverses are recomputed from the
// link's step structure, and probabilities come from adaptive Gauss-Kronrod
// integration instead of the fixed rules used by the main path.

#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "cfbounds/bounds.hpp"
#include "cfbounds/probability.hpp"

namespace cfbounds::oracle {

/// U - alpha concentrated at one point.
struct PointMass {
    double at = 0.0;
};

using OracleLaw = std::variant<GaussianConvolution, LogisticNormalMixture, PointMass>;

struct SmallInstance {
    ModelSpec model;
    /// At most four regressor sequences with their population weights.
    std::vector<RegressorSequence> cells;
    std::vector<double> weights;
    /// Law of U - alpha given each cell.
    std::vector<OracleLaw> laws;

    /// Throws std::invalid_argument unless the instance is small and consistent.
    void validate() const;
};

/// P(V <= c) for V with the given law, by adaptive quadrature.
[[nodiscard]] double law_cdf(const OracleLaw& law, const ExtendedReal& c);

/// The same law for the main probability module, when it has one.
[[nodiscard]] std::optional<LatentShiftDistribution> as_latent(const OracleLaw& law);

/// h^-(y) recomputed from the link's breakpoints; y above the infimum.
[[nodiscard]] ExtendedReal step_inverse(const LinkFunction& link, double y);

/// tau_{t,x,y}(X_cell) by direct integration.
[[nodiscard]] double brute_force_tau(const SmallInstance& inst, std::size_t cell, const CounterfactualQuery& q);

/// P(Y_s >= y' | X_cell) for every period and every y' above the infimum.
[[nodiscard]] SurvivalTable brute_force_table(const SmallInstance& inst, std::size_t cell);

/// Two-period probit design with X_t = 1{alpha >= eta_t}, alpha and eta
/// standard normal: P(X = x) by adaptive quadrature over alpha.
[[nodiscard]] double discrete_cell_probability(const std::array<int, 2>& x);
/// E[Phi(alpha + c) | X = x], the CDF of U - alpha at c within the cell.
[[nodiscard]] double discrete_cell_cdf(const std::array<int, 2>& x, double c);

/// Normal CDF evaluated in 50-digit arithmetic.
[[nodiscard]] double reference_normal_cdf(double z);

struct Mismatch {
    std::string what;
    int period = 0;
    double outcome = 0.0;
};

struct BoundCheckReport {
    double lower = 0.0;
    double upper = 1.0;
    bool point_identified = false;
    double tau = 0.0;
    std::vector<Mismatch> mismatches;

    [[nodiscard]] bool ok() const noexcept { return mismatches.empty(); }
    [[nodiscard]] std::string describe() const;
};

/// Recomputes the lower/upper sets over every (s, y'), the cross-period
/// interval, its witnesses and point-identification flag, and compares
/// them with the bounds module run on the oracle's own table. Also checks
/// containment of brute_force_tau (to quad_slack), nesting in the
/// same-period bounds and monotone tightening over periods 1..T'.
[[nodiscard]] BoundCheckReport brute_force_bound_check(const SmallInstance& inst, std::size_t cell,
                                                       const CounterfactualQuery& q, double quad_slack = 1e-9);

/// Random instance with dyadic thresholds, coefficients and regressors, T <= 8
/// and at most 8 outcome values.
[[nodiscard]] SmallInstance random_small_instance(std::mt19937_64& rng);

/// A query on a random instance: y above the infimum, x from a dyadic grid.
[[nodiscard]] CounterfactualQuery random_query(const SmallInstance& inst, std::mt19937_64& rng);

}  // namespace cfbounds::oracle
