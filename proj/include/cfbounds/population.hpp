#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cfbounds/bounds.hpp"
#include "cfbounds/probability.hpp"

namespace cfbounds {

/// One regressor sequence (a Monte Carlo draw or a discrete cell) with its
/// population weight, observed survival table and, when the design knows
/// it, the law of U - alpha given X.
struct PopulationMember {
    double weight = 1.0;
    RegressorSequence regressors;
    SurvivalTable survival;
    std::optional<LatentShiftDistribution> latent;
};

/// A distribution over regressor sequences paired with a model.
class Population {
public:
    virtual ~Population() = default;

    [[nodiscard]] virtual const ModelSpec& model() const = 0;
    [[nodiscard]] virtual std::size_t size() const = 0;
    /// Deterministic in i.
    [[nodiscard]] virtual PopulationMember member(std::size_t i) const = 0;
    /// Equal-weight Monte Carlo draws, for which standard errors are reported.
    [[nodiscard]] virtual bool monte_carlo() const { return false; }
};

/// Explicitly enumerated members; weights must sum to 1.
class CellPopulation final : public Population {
public:
    CellPopulation(ModelSpec model, std::vector<PopulationMember> members);

    [[nodiscard]] const ModelSpec& model() const override { return model_; }
    [[nodiscard]] std::size_t size() const override { return members_.size(); }
    [[nodiscard]] PopulationMember member(std::size_t i) const override { return members_.at(i); }

private:
    ModelSpec model_;
    std::vector<PopulationMember> members_;
};

}  // namespace cfbounds
