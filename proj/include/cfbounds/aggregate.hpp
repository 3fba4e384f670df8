#pragma once

// Population objects built from per-X bound intervals: expected
// counterfactual outcomes, average structural functions and ATEs.

#include <cstddef>
#include <optional>
#include <vector>

#include "cfbounds/bounds.hpp"
#include "cfbounds/population.hpp"

namespace cfbounds {

/// Streaming pairwise summation: partial sums of equal-sized blocks are
/// merged like a binary counter, giving O(log n) error growth in O(log n) memory.
class PairwiseSum {
public:
    void add(double v);
    [[nodiscard]] double total() const;
    [[nodiscard]] std::size_t count() const noexcept { return count_; }

private:
    struct Block {
        double sum;
        std::size_t size;
    };
    std::vector<Block> stack_;
    std::size_t count_ = 0;
};

/// Weighted mean with a Monte Carlo standard error (equal weights only).
class MeanAccumulator {
public:
    void add(double weight, double value);
    [[nodiscard]] double mean() const;
    /// Standard error of an equal-weight mean; 0 with fewer than two values.
    [[nodiscard]] double stderr_of_mean() const;

private:
    PairwiseSum weighted_;
    PairwiseSum weight_;
    PairwiseSum sum_;
    PairwiseSum sumsq_;
};

struct PopulationBound {
    double lower = 0.0;
    double upper = 1.0;
    /// Number of Monte Carlo draws of X, 0 for exact cell weighting.
    std::size_t mc_draws = 0;
    double stderr_lower = 0.0;
    double stderr_upper = 0.0;
    /// Population value of the target when every member carries its latent law.
    std::optional<double> truth;
    double stderr_truth = 0.0;
    /// Members whose interval crossed and was clipped to its midpoint.
    std::size_t crossed = 0;

    [[nodiscard]] double width() const noexcept { return upper - lower; }
};

/// Largest tolerated weight share of crossed per-X intervals.
inline constexpr double kMaxCrossedShare = 0.01;

/// E_X of the Theorem 2 bounds restricted to opts.periods.
[[nodiscard]] PopulationBound expected_counterfactual_bounds(const Population& pop, const CounterfactualQuery& q,
                                                             const BoundOptions& opts = {});

struct SweepCell {
    int target = 1;
    /// T': the bounds use periods 1..T' (and the target period when requested).
    int horizon = 1;
    PopulationBound bound;
};

/// expected_counterfactual_bounds for every (target, horizon) pair, computed
/// in one pass over the population. Output is ordered by target, then horizon.
[[nodiscard]] std::vector<SweepCell> counterfactual_sweep(const Population& pop, const Regressor& x, double y,
                                                          const std::vector<int>& targets,
                                                          const std::vector<int>& horizons, bool include_target,
                                                          const BoundOptions& opts = {});

struct AsfOptions {
    BoundOptions bounds;
    /// Trapezoid points on [0, y_max] for continuous supports.
    int grid_points = 512;
    /// y_max is doubled until the population upper bound at y_max drops below this.
    double tail_tolerance = 1e-4;
    /// Fixed y_max; skips the search when set.
    std::optional<double> y_max;
};

/// Bounds on E[Y_t(x)] = E_X[ int_0^inf tau_{t,x,y}(X) dy ]. Finite supports
/// use the exact tail-sum; continuous supports the trapezoid rule. Throws
/// std::invalid_argument when the support contains negative outcomes.
[[nodiscard]] PopulationBound asf_bounds(const Population& pop, int t, const Regressor& x,
                                         const AsfOptions& opts = {});

/// Bounds on E_X[tau_{t,x1,y}(X) - tau_{t,x0,y}(X)] from the per-X interval
/// difference [L1 - U0, U1 - L0].
[[nodiscard]] PopulationBound ate_bounds(const Population& pop, int t, const Regressor& x1, const Regressor& x0,
                                         double y, const BoundOptions& opts = {});

}  // namespace cfbounds
