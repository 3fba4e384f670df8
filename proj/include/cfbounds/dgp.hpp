#pragma once

// Data-generating processes for the three experimental designs: a two-way
// binary probit with an AR(1) continuous regressor, staggered adoption with
// binary/ordered outcomes, and a two-period probit with binary regressors.

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "cfbounds/bounds.hpp"
#include "cfbounds/population.hpp"
#include "cfbounds/probability.hpp"

namespace cfbounds {

/// 64-bit mix of a seed and stream identifiers (splitmix64 finalizer).
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) noexcept;

/// Independent generator for (seed, stream, substream); results do not
/// depend on the order in which streams are consumed.
[[nodiscard]] std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

// ---------------------------------------------------------------------------

/// Y_t = 1{alpha + X_t - U_t >= lambda_t}, X_1 ~ N(0, sx2),
/// X_t | X_{t-1} ~ N(rho X_{t-1}, sx2), alpha | X ~ N(X_1, 1), U ~ N(0, 1).
struct ProbitContinuousDesign {
    int periods = 20;
    double sigma_x2 = 1.0;
    double rho = 0.5;
    bool time_effects = true;

    void validate() const;
    /// (-1 + 2(t+1)/T)^2 with time effects, else 0.
    [[nodiscard]] double threshold(int t) const;
    [[nodiscard]] ModelSpec model() const;
    [[nodiscard]] RegressorSequence draw_regressors(std::uint64_t seed, std::uint64_t unit) const;
    /// U - alpha | X ~ N(-X_1, 2).
    [[nodiscard]] LatentShiftDistribution latent_law(const RegressorSequence& X) const;
};

/// Monte Carlo population of `draws` regressor sequences.
[[nodiscard]] std::unique_ptr<Population> probit_design_population(const ProbitContinuousDesign& design,
                                                                   std::size_t draws, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// Middle thresholds lambda_{Jbar,t} (center[0] = 0) and the fan-out scales.
struct ThresholdDraw {
    std::vector<double> center;
    double eta_plus = 0.0;
    double eta_minus = 0.0;
};

/// center[t] ~ U[-1, 1] for t >= 2, eta+/- ~ U[0, 1]. The draw for fewer
/// periods is a prefix of the draw for more.
[[nodiscard]] ThresholdDraw draw_staggered_thresholds(int periods, std::uint64_t seed);

/// Group g is untreated through period g and treated afterwards;
/// alpha | g ~ N(g/G - 1/2, 1), U standard logistic, Y_t >= j iff
/// alpha + X_t - U_t >= lambda_{jt}. Groups have equal mass.
struct StaggeredDesign {
    int groups = 19;
    int categories = 2;
    ThresholdDraw draw;

    void validate() const;
    [[nodiscard]] int periods() const noexcept { return static_cast<int>(draw.center.size()); }
    /// Jbar = J/2 + 1, the first outcome in the upper half.
    [[nodiscard]] int top_half_start() const noexcept { return categories / 2 + 1; }
    /// lambda_{jt} for j = 2..J.
    [[nodiscard]] std::vector<double> thresholds(int t) const;
    [[nodiscard]] ModelSpec model() const;
    [[nodiscard]] RegressorSequence regressors(int group) const;
    [[nodiscard]] LatentShiftDistribution latent_law(int group) const;
};

/// One member per group, weight 1/G, exact survival tables.
[[nodiscard]] std::unique_ptr<Population> staggered_design_population(const StaggeredDesign& design);

// ---------------------------------------------------------------------------

/// Y_t = 1{alpha + X_t b - U_t - lambda_t >= 0}, t = 1, 2, with
/// X_t = 1{alpha >= eta_t}; alpha, U, eta standard normal; lambda_1 = 0.
struct DiscreteProbitDesign {
    double beta = 1.0;
    double lambda2 = 0.0;

    void validate() const;
    [[nodiscard]] ModelSpec model() const;
};

struct DiscreteCell {
    std::array<int, 2> x{};
    double probability = 0.0;
    ProbitFixedEffectMixture law;
    SurvivalTable survival;

    [[nodiscard]] RegressorSequence regressors() const;
};

/// The four cells X in {0,1}^2 in the order (0,0), (0,1), (1,0), (1,1).
/// Cell laws of alpha come from 256-point Gauss-Legendre on [-8, 8] with
/// density proportional to phi(a) prod_t Phi(a)^{x_t} (1 - Phi(a))^{1 - x_t}.
[[nodiscard]] std::vector<DiscreteCell> discrete_design_cells(const DiscreteProbitDesign& design);

[[nodiscard]] std::unique_ptr<Population> discrete_design_population(const DiscreteProbitDesign& design);

// ---------------------------------------------------------------------------

struct Panel {
    std::vector<RegressorSequence> regressors;
    std::vector<std::vector<double>> outcomes;
    /// Group (staggered) or cell index (discrete); 0 for the continuous design.
    std::vector<int> group;
};

[[nodiscard]] Panel simulate_panel(const ProbitContinuousDesign& design, std::size_t n, std::uint64_t seed);
[[nodiscard]] Panel simulate_panel(const StaggeredDesign& design, std::size_t n, std::uint64_t seed);
[[nodiscard]] Panel simulate_panel(const DiscreteProbitDesign& design, std::size_t n, std::uint64_t seed);

}  // namespace cfbounds
