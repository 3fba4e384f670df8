#include "cfbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cfbounds {

// ---------------------------------------------------------------------------
// Model types

ModelSpec::ModelSpec(std::vector<double> beta, std::vector<LinkFunction> links)
    : beta_(std::move(beta)), links_(std::move(links)) {
    if (links_.empty()) throw std::invalid_argument("ModelSpec: need at least one period");
    for (double b : beta_) {
        if (!std::isfinite(b)) throw std::invalid_argument("ModelSpec: non-finite coefficient");
    }
    for (std::size_t t = 1; t < links_.size(); ++t) {
        if (!(links_[t].support() == links_.front().support())) {
            throw std::invalid_argument("ModelSpec: period " + std::to_string(t + 1) +
                                        " has outcome support " + links_[t].support().describe() +
                                        ", period 1 has " + links_.front().support().describe());
        }
    }
}

const LinkFunction& ModelSpec::link(int period) const {
    if (period < 1 || period > periods()) {
        throw std::out_of_range("ModelSpec: period " + std::to_string(period) + " outside 1.." +
                                std::to_string(periods()));
    }
    return links_[static_cast<std::size_t>(period - 1)];
}

double ModelSpec::index(const Regressor& x) const {
    if (x.size() != beta_.size()) {
        throw std::invalid_argument("ModelSpec: regressor has dimension " + std::to_string(x.size()) +
                                    ", beta has " + std::to_string(beta_.size()));
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += x[j] * beta_[j];
    return acc;
}

RegressorSequence::RegressorSequence(std::vector<Regressor> values) : values_(std::move(values)) {
    for (const auto& v : values_) {
        if (v.size() != values_.front().size()) {
            throw std::invalid_argument("RegressorSequence: inconsistent dimensions across periods");
        }
    }
}

RegressorSequence RegressorSequence::scalar(const std::vector<double>& values) {
    std::vector<Regressor> seq;
    seq.reserve(values.size());
    for (double v : values) seq.push_back({v});
    return RegressorSequence(std::move(seq));
}

const Regressor& RegressorSequence::at(int period) const {
    if (period < 1 || period > periods()) {
        throw std::out_of_range("RegressorSequence: period " + std::to_string(period) + " outside 1.." +
                                std::to_string(periods()));
    }
    return values_[static_cast<std::size_t>(period - 1)];
}

// ---------------------------------------------------------------------------
// SurvivalTable

SurvivalTable::SurvivalTable(std::vector<double> outcomes, std::vector<std::vector<double>> rows)
    : periods_(static_cast<int>(rows.size())), outcomes_(std::move(outcomes)), rows_(std::move(rows)) {
    if (rows_.empty()) throw std::invalid_argument("SurvivalTable: no periods");
    if (!std::is_sorted(outcomes_.begin(), outcomes_.end())) {
        throw std::invalid_argument("SurvivalTable: outcomes must be sorted");
    }
    for (std::size_t s = 0; s < rows_.size(); ++s) {
        if (rows_[s].size() != outcomes_.size()) {
            throw std::invalid_argument("SurvivalTable: period " + std::to_string(s + 1) + " has " +
                                        std::to_string(rows_[s].size()) + " entries, expected " +
                                        std::to_string(outcomes_.size()));
        }
        for (double p : rows_[s]) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("SurvivalTable: probability outside [0,1] in period " +
                                            std::to_string(s + 1));
            }
        }
    }
}

SurvivalTable::SurvivalTable(int periods, Function fn) : periods_(periods), fn_(std::move(fn)) {
    if (periods_ < 1) throw std::invalid_argument("SurvivalTable: no periods");
    if (!fn_) throw std::invalid_argument("SurvivalTable: empty survival function");
}

const std::vector<double>& SurvivalTable::row(int period) const {
    if (!is_finite()) throw std::logic_error("SurvivalTable: row() on a continuous table");
    if (period < 1 || period > periods_) throw std::out_of_range("SurvivalTable: period out of range");
    return rows_[static_cast<std::size_t>(period - 1)];
}

double SurvivalTable::probability(int period, double outcome) const {
    if (period < 1 || period > periods_) throw std::out_of_range("SurvivalTable: period out of range");
    if (fn_) {
        const double p = fn_(period, outcome);
        if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("SurvivalTable: probability outside [0,1]");
        return p;
    }
    auto it = std::lower_bound(outcomes_.begin(), outcomes_.end(), outcome);
    if (it == outcomes_.end() || *it != outcome) {
        throw std::out_of_range("SurvivalTable: no entry for y' = " + std::to_string(outcome));
    }
    return rows_[static_cast<std::size_t>(period - 1)][static_cast<std::size_t>(it - outcomes_.begin())];
}

std::vector<std::string> SurvivalTable::monotonicity_violations() const {
    std::vector<std::string> out;
    if (!is_finite()) return out;
    for (std::size_t s = 0; s < rows_.size(); ++s) {
        for (std::size_t k = 1; k < outcomes_.size(); ++k) {
            if (rows_[s][k] > rows_[s][k - 1]) {
                std::ostringstream os;
                os << "period " << s + 1 << ": P(Y >= " << outcomes_[k] << ") = " << rows_[s][k]
                   << " exceeds P(Y >= " << outcomes_[k - 1] << ") = " << rows_[s][k - 1];
                out.push_back(os.str());
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Indices and classification

std::string to_string(IndexComparison c) {
    switch (c) {
        case IndexComparison::Lower: return "lower";
        case IndexComparison::Upper: return "upper";
        case IndexComparison::Both: return "both";
    }
    return "?";
}

std::vector<int> first_periods(int count, int target, bool include_target) {
    std::vector<int> out;
    for (int s = 1; s <= count; ++s) out.push_back(s);
    if (include_target && target > count) out.push_back(target);
    return out;
}

ExtendedReal counterfactual_index(const ModelSpec& model, const CounterfactualQuery& q) {
    return ExtendedReal(model.index(q.x)) - model.link(q.t).generalized_inverse(q.y);
}

ExtendedReal observed_index(const ModelSpec& model, const RegressorSequence& X, int period, double outcome) {
    return ExtendedReal(model.index(X.at(period))) - model.link(period).generalized_inverse(outcome);
}

IndexComparison classify(const ExtendedReal& observed, const ExtendedReal& counterfactual, double tol) {
    if (observed.is_finite() && counterfactual.is_finite()) {
        const double d = observed.value() - counterfactual.value();
        if (std::abs(d) <= tol) return IndexComparison::Both;
        return d > 0.0 ? IndexComparison::Upper : IndexComparison::Lower;
    }
    if (observed == counterfactual) return IndexComparison::Both;
    return observed > counterfactual ? IndexComparison::Upper : IndexComparison::Lower;
}

namespace {

void check_inputs(const ModelSpec& model, const RegressorSequence& X, const CounterfactualQuery& q,
                  const SurvivalTable& probs) {
    if (X.periods() != model.periods()) {
        throw std::invalid_argument("regressor sequence has " + std::to_string(X.periods()) +
                                    " periods, model has " + std::to_string(model.periods()));
    }
    if (q.t < 1 || q.t > model.periods()) {
        throw std::invalid_argument("query period " + std::to_string(q.t) + " outside 1.." +
                                    std::to_string(model.periods()));
    }
    if (probs.periods() != model.periods()) {
        throw std::invalid_argument("survival table has " + std::to_string(probs.periods()) +
                                    " periods, model has " + std::to_string(model.periods()));
    }
    if (model.support().is_finite()) {
        if (!probs.is_finite() || probs.outcomes() != model.support().lower_points()) {
            throw std::invalid_argument("survival table outcomes do not match the model's support " +
                                        model.support().describe());
        }
    }
}

std::vector<int> resolve_periods(const ModelSpec& model, const BoundOptions& opts) {
    if (opts.periods.empty()) return first_periods(model.periods(), 0, false);
    for (int s : opts.periods) {
        if (s < 1 || s > model.periods()) {
            throw std::invalid_argument("period " + std::to_string(s) + " outside 1.." +
                                        std::to_string(model.periods()));
        }
    }
    return opts.periods;
}

void settle_crossing(BoundInterval& b) {
    b.crossed = b.lower > b.upper + kRoundingSlack;
    if (!b.crossed && b.lower > b.upper) b.lower = b.upper = 0.5 * (b.lower + b.upper);
}

// Running sup over the lower set and inf over the upper set, scanned in
// (period, outcome) order; the first pair attaining an extremum is kept.
struct Accumulator {
    double best_lower = -std::numeric_limits<double>::infinity();
    double best_upper = std::numeric_limits<double>::infinity();
    std::optional<Witness> lower_witness;
    std::optional<Witness> upper_witness;
    bool point_identified = false;

    void add(int period, double outcome, const ExtendedReal& obs, const ExtendedReal& cf,
             IndexComparison cls, double p) {
        if (cls != IndexComparison::Upper && p > best_lower) {
            best_lower = p;
            lower_witness = Witness{period, outcome};
        }
        if (cls != IndexComparison::Lower && p < best_upper) {
            best_upper = p;
            upper_witness = Witness{period, outcome};
        }
        // Infinite ties are set members but never identify the parameter.
        if (cls == IndexComparison::Both && obs.is_finite() && cf.is_finite()) point_identified = true;
    }

    [[nodiscard]] BoundInterval finish() const {
        BoundInterval b;
        b.lower = std::max(0.0, best_lower);
        b.upper = std::min(1.0, best_upper);
        b.lower_witness = lower_witness;
        b.upper_witness = upper_witness;
        settle_crossing(b);
        b.point_identified = point_identified;
        return b;
    }
};

template <typename Visit>
void for_each_pair(const ModelSpec& model, const RegressorSequence& X, const CounterfactualQuery& q,
                   const SurvivalTable& probs, const std::vector<int>& periods, const BoundOptions& opts,
                   const ExtendedReal& cf, Visit&& visit) {
    const bool finite = model.support().is_finite();
    for (int s : periods) {
        const double xb = model.index(X.at(s));
        const LinkFunction& link = model.link(s);
        if (finite) {
            const auto& outcomes = probs.outcomes();
            const auto& row = probs.row(s);
            for (std::size_t k = 0; k < outcomes.size(); ++k) {
                const ExtendedReal obs = ExtendedReal(xb) - link.generalized_inverse(outcomes[k]);
                visit(s, outcomes[k], obs, classify(obs, cf, opts.tol), row[k]);
            }
        } else {
            // The attaining outcome solves the index equation exactly; recomputing
            // its index in floating point could break the tie by rounding.
            std::optional<double> attaining;
            if (cf.is_finite()) attaining = link.outcome_at_inverse(xb - cf.value());
            for (double yp : candidate_outcomes(model, X, q, s, opts)) {
                if (attaining && yp == *attaining) {
                    visit(s, yp, cf, IndexComparison::Both, probs.probability(s, yp));
                    continue;
                }
                const ExtendedReal obs = ExtendedReal(xb) - link.generalized_inverse(yp);
                visit(s, yp, obs, classify(obs, cf, opts.tol), probs.probability(s, yp));
            }
        }
    }
}

BoundInterval bounds_over(const ModelSpec& model, const RegressorSequence& X, const CounterfactualQuery& q,
                          const SurvivalTable& probs, const std::vector<int>& periods,
                          const BoundOptions& opts) {
    check_inputs(model, X, q, probs);
    const ExtendedReal cf = counterfactual_index(model, q);
    Accumulator acc;
    for_each_pair(model, X, q, probs, periods, opts, cf,
                  [&](int s, double yp, const ExtendedReal& obs, IndexComparison cls, double p) {
                      acc.add(s, yp, obs, cf, cls, p);
                  });
    return acc.finish();
}

}  // namespace

std::vector<double> candidate_outcomes(const ModelSpec& model, const RegressorSequence& X,
                                       const CounterfactualQuery& q, int period, const BoundOptions& opts) {
    const OutcomeSupport& support = model.support();
    if (support.is_finite()) return support.lower_points();

    std::vector<double> out;
    const ExtendedReal cf = counterfactual_index(model, q);
    if (cf.is_finite()) {
        // Solve X_s b - h_s^-(y') = cf for y'.
        const double latent = model.index(X.at(period)) - cf.value();
        if (auto yp = model.link(period).outcome_at_inverse(latent)) out.push_back(*yp);
    }
    for (double g : opts.continuous_grid) {
        if (support.contains_above_infimum(g)) out.push_back(g);
    }
    const ExtendedReal inf = support.infimum();
    if (inf.is_finite()) out.push_back(inf.value() + opts.limit_epsilon);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<ClassifiedPair> classify_pairs(const ModelSpec& model, const RegressorSequence& X,
                                           const CounterfactualQuery& q, const SurvivalTable& probs,
                                           const std::vector<int>& periods, const BoundOptions& opts) {
    check_inputs(model, X, q, probs);
    const ExtendedReal cf = counterfactual_index(model, q);
    std::vector<ClassifiedPair> out;
    for_each_pair(model, X, q, probs, periods, opts, cf,
                  [&](int s, double yp, const ExtendedReal& obs, IndexComparison cls, double p) {
                      out.push_back({s, yp, obs, cls, p});
                  });
    return out;
}

BoundInterval theorem1_bounds(const ModelSpec& model, const RegressorSequence& X, const CounterfactualQuery& q,
                              const SurvivalTable& probs, const BoundOptions& opts) {
    return bounds_over(model, X, q, probs, {q.t}, opts);
}

BoundInterval theorem2_bounds(const ModelSpec& model, const RegressorSequence& X, const CounterfactualQuery& q,
                              const SurvivalTable& probs, const BoundOptions& opts) {
    return bounds_over(model, X, q, probs, resolve_periods(model, opts), opts);
}

std::vector<BoundInterval> per_period_bounds(const ModelSpec& model, const RegressorSequence& X,
                                             const CounterfactualQuery& q, const SurvivalTable& probs,
                                             const BoundOptions& opts) {
    std::vector<BoundInterval> out;
    for (int s : resolve_periods(model, opts)) out.push_back(bounds_over(model, X, q, probs, {s}, opts));
    return out;
}

BoundInterval intersect(const std::vector<BoundInterval>& intervals) {
    if (intervals.empty()) throw std::invalid_argument("intersect: no intervals");
    BoundInterval out = intervals.front();
    for (std::size_t i = 1; i < intervals.size(); ++i) {
        const BoundInterval& b = intervals[i];
        if (b.lower > out.lower || (b.lower == out.lower && !out.lower_witness && b.lower_witness)) {
            out.lower = b.lower;
            out.lower_witness = b.lower_witness;
        }
        if (b.upper < out.upper || (b.upper == out.upper && !out.upper_witness && b.upper_witness)) {
            out.upper = b.upper;
            out.upper_witness = b.upper_witness;
        }
        out.point_identified = out.point_identified || b.point_identified;
    }
    settle_crossing(out);
    return out;
}

BoundInterval worst_case_bounds(const std::vector<ModelSpec>& candidates, const RegressorSequence& X,
                                const CounterfactualQuery& q, const std::vector<SurvivalTable>& probs,
                                const BoundOptions& opts) {
    if (candidates.empty()) throw std::invalid_argument("worst_case_bounds: no candidates");
    if (probs.size() != 1 && probs.size() != candidates.size()) {
        throw std::invalid_argument("worst_case_bounds: need one survival table or one per candidate");
    }
    BoundInterval out;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const SurvivalTable& table = probs.size() == 1 ? probs.front() : probs[c];
        const BoundInterval b = theorem2_bounds(candidates[c], X, q, table, opts);
        if (c == 0) {
            out = b;
            continue;
        }
        if (b.lower < out.lower) {
            out.lower = b.lower;
            out.lower_witness = b.lower_witness;
        }
        if (b.upper > out.upper) {
            out.upper = b.upper;
            out.upper_witness = b.upper_witness;
        }
        out.point_identified = out.point_identified && b.point_identified;
        out.crossed = out.crossed || b.crossed;
    }
    out.point_identified = out.point_identified && out.lower == out.upper;
    return out;
}

std::vector<MomentResidual> moment_inequality_residuals(const ModelSpec& model, const RegressorSequence& X,
                                                        const CounterfactualQuery& q,
                                                        const SurvivalTable& probs, double tau,
                                                        const BoundOptions& opts) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("moment_inequality_residuals: tau outside [0,1]");
    check_inputs(model, X, q, probs);
    const ExtendedReal cf = counterfactual_index(model, q);
    std::vector<MomentResidual> out;
    for_each_pair(model, X, q, probs, resolve_periods(model, opts), opts, cf,
                  [&](int s, double yp, const ExtendedReal& obs, IndexComparison cls, double p) {
                      MomentResidual r{s, yp, 0.0, false};
                      if (cls == IndexComparison::Both) {
                          r.infinite_index = !(obs.is_finite() && cf.is_finite());
                      } else if (obs.is_finite() && cf.is_finite()) {
                          r.residual = (obs.value() - cf.value()) * (p - tau);
                      } else {
                          r.infinite_index = true;
                          r.residual = (cls == IndexComparison::Upper ? 1.0 : -1.0) * (p - tau);
                      }
                      out.push_back(r);
                  });
    return out;
}

}  // namespace cfbounds
