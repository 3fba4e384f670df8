#include "cfbounds/probability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cfbounds/quadrature.hpp"

namespace cfbounds {

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) noexcept {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double logistic_cdf(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void validate(const LatentShiftDistribution& dist) {
    struct Check {
        void operator()(const GaussianConvolution& g) const {
            if (!std::isfinite(g.mean) || !(g.variance > 0.0) || !std::isfinite(g.variance)) {
                throw std::invalid_argument("GaussianConvolution: need finite mean and variance > 0");
            }
        }
        void operator()(const LogisticNormalMixture& l) const {
            if (!std::isfinite(l.normal_mean) || !(l.normal_variance > 0.0) || !std::isfinite(l.normal_variance)) {
                throw std::invalid_argument("LogisticNormalMixture: need finite mean and variance > 0");
            }
            if (l.nodes < 2) throw std::invalid_argument("LogisticNormalMixture: need at least 2 nodes");
        }
        void operator()(const ProbitFixedEffectMixture& p) const {
            if (p.alpha.empty() || p.alpha.size() != p.weights.size()) {
                throw std::invalid_argument("ProbitFixedEffectMixture: need matching nonempty atoms and weights");
            }
            double total = 0.0;
            for (double w : p.weights) {
                if (!(w >= 0.0)) throw std::invalid_argument("ProbitFixedEffectMixture: negative weight");
                total += w;
            }
            if (std::abs(total - 1.0) > 1e-9) {
                throw std::invalid_argument("ProbitFixedEffectMixture: weights must sum to 1");
            }
        }
    };
    std::visit(Check{}, dist);
}

double survival_cdf(const LatentShiftDistribution& dist, const ExtendedReal& c) {
    if (c.is_neg_inf()) return 0.0;
    if (c.is_pos_inf()) return 1.0;
    const double x = c.value();
    struct Cdf {
        double x;
        double operator()(const GaussianConvolution& g) const {
            return normal_cdf((x - g.mean) / std::sqrt(g.variance));
        }
        double operator()(const LogisticNormalMixture& l) const {
            // int Lambda(x + a) phi((a - m)/sigma)/sigma da with a = m + sqrt(2) sigma z.
            const QuadratureRule& rule = gauss_hermite(l.nodes);
            const double scale = std::numbers::sqrt2 * std::sqrt(l.normal_variance);
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                acc += rule.weights[i] * logistic_cdf(x + l.normal_mean + scale * rule.nodes[i]);
            }
            return acc / std::sqrt(std::numbers::pi);
        }
        double operator()(const ProbitFixedEffectMixture& p) const {
            double acc = 0.0;
            for (std::size_t k = 0; k < p.alpha.size(); ++k) acc += p.weights[k] * normal_cdf(x + p.alpha[k]);
            return acc;
        }
    };
    const double p = std::visit(Cdf{x}, dist);
    return std::clamp(p, 0.0, 1.0);
}

SurvivalTable exact_survival_table(const ModelSpec& model, const RegressorSequence& X,
                                   const LatentShiftDistribution& dist) {
    validate(dist);
    if (X.periods() != model.periods()) {
        throw std::invalid_argument("exact_survival_table: regressor sequence and model disagree on T");
    }
    if (model.support().is_finite()) {
        std::vector<double> outcomes = model.support().lower_points();
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(model.periods()));
        for (int s = 1; s <= model.periods(); ++s) {
            auto& row = rows[static_cast<std::size_t>(s - 1)];
            row.reserve(outcomes.size());
            for (double yp : outcomes) row.push_back(survival_cdf(dist, observed_index(model, X, s, yp)));
        }
        return {std::move(outcomes), std::move(rows)};
    }
    return {model.periods(), [model, X, dist](int s, double yp) {
                return survival_cdf(dist, observed_index(model, X, s, yp));
            }};
}

double true_tau(const ModelSpec& model, const CounterfactualQuery& q, const LatentShiftDistribution& dist) {
    validate(dist);
    return survival_cdf(dist, counterfactual_index(model, q));
}

std::vector<double> isotonic_nonincreasing(const std::vector<double>& values, const std::vector<double>& weights) {
    if (values.size() != weights.size()) throw std::invalid_argument("isotonic: size mismatch");
    struct Block {
        double mean;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("isotonic: weights must be positive");
        blocks.push_back({values[i], weights[i], 1});
        // Nonincreasing: merge while the newest block exceeds its predecessor.
        while (blocks.size() > 1 && blocks[blocks.size() - 1].mean > blocks[blocks.size() - 2].mean) {
            Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            const double w = a.weight + b.weight;
            a.mean = (a.mean * a.weight + b.mean * b.weight) / w;
            a.weight = w;
            a.count += b.count;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
    return out;
}

EstimatedSurvival repair_monotonicity(const SurvivalTable& table, std::vector<std::size_t> sample_size) {
    if (!table.is_finite()) throw std::invalid_argument("repair_monotonicity: finite table required");
    std::vector<std::vector<double>> rows;
    std::vector<std::string> repairs;
    for (int s = 1; s <= table.periods(); ++s) {
        const auto& row = table.row(s);
        bool monotone = true;
        for (std::size_t k = 1; k < row.size(); ++k) monotone = monotone && row[k] <= row[k - 1];
        if (monotone) {
            rows.push_back(row);
            continue;
        }
        rows.push_back(isotonic_nonincreasing(row, std::vector<double>(row.size(), 1.0)));
        std::ostringstream os;
        os << "period " << s << ": pooled adjacent violators to restore a nonincreasing survival function";
        repairs.push_back(os.str());
    }
    return {SurvivalTable(table.outcomes(), std::move(rows)), std::move(sample_size), std::move(repairs)};
}

EstimatedSurvival mc_survival_table(const std::vector<std::vector<double>>& outcomes,
                                    const std::vector<double>& lower_outcomes) {
    if (outcomes.empty()) throw std::runtime_error("mc_survival_table: empty cell, insufficient data");
    const std::size_t periods = outcomes.front().size();
    if (periods == 0) throw std::invalid_argument("mc_survival_table: no periods");
    std::vector<std::vector<std::size_t>> counts(periods, std::vector<std::size_t>(lower_outcomes.size(), 0));
    for (const auto& unit : outcomes) {
        if (unit.size() != periods) throw std::invalid_argument("mc_survival_table: ragged outcome panel");
        for (std::size_t s = 0; s < periods; ++s) {
            for (std::size_t k = 0; k < lower_outcomes.size(); ++k) {
                if (unit[s] >= lower_outcomes[k]) ++counts[s][k];
            }
        }
    }
    const auto n = static_cast<double>(outcomes.size());
    std::vector<std::vector<double>> rows(periods);
    for (std::size_t s = 0; s < periods; ++s) {
        for (std::size_t c : counts[s]) rows[s].push_back(static_cast<double>(c) / n);
    }
    SurvivalTable raw(lower_outcomes, std::move(rows));
    return repair_monotonicity(raw, std::vector<std::size_t>(periods, outcomes.size()));
}

}  // namespace cfbounds
