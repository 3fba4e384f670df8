#include "cfbounds/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cfbounds/probability.hpp"

namespace cfbounds {

void PairwiseSum::add(double v) {
    stack_.push_back({v, 1});
    while (stack_.size() >= 2 && stack_[stack_.size() - 1].size == stack_[stack_.size() - 2].size) {
        const Block top = stack_.back();
        stack_.pop_back();
        stack_.back().sum += top.sum;
        stack_.back().size += top.size;
    }
    ++count_;
}

double PairwiseSum::total() const {
    // Smallest blocks first.
    double acc = 0.0;
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) acc += it->sum;
    return acc;
}

void MeanAccumulator::add(double weight, double value) {
    weighted_.add(weight * value);
    weight_.add(weight);
    sum_.add(value);
    sumsq_.add(value * value);
}

double MeanAccumulator::mean() const {
    const double w = weight_.total();
    if (!(w > 0.0)) throw std::logic_error("MeanAccumulator: no weight accumulated");
    return weighted_.total() / w;
}

double MeanAccumulator::stderr_of_mean() const {
    const auto n = static_cast<double>(sum_.count());
    if (n < 2.0) return 0.0;
    const double m = sum_.total() / n;
    const double var = std::max(0.0, (sumsq_.total() - n * m * m) / (n - 1.0));
    return std::sqrt(var / n);
}

namespace {

/// Running population averages of a lower end, an upper end and the truth.
class BoundAverager {
public:
    explicit BoundAverager(const Population& pop) : mc_(pop.monte_carlo()), draws_(pop.monte_carlo() ? pop.size() : 0) {}

    void add(double weight, double lower, double upper, std::optional<double> truth) {
        if (lower > upper) {
            const double mid = 0.5 * (lower + upper);
            lower = mid;
            upper = mid;
            ++crossed_;
            crossed_weight_ += weight;
        }
        lower_.add(weight, lower);
        upper_.add(weight, upper);
        total_weight_ += weight;
        if (truth) {
            truth_.add(weight, *truth);
        } else {
            all_truth_ = false;
        }
    }

    /// Records a member whose component interval crossed and was clipped by the caller.
    void note_crossed(double weight) {
        ++crossed_;
        crossed_weight_ += weight;
    }

    [[nodiscard]] PopulationBound result() const {
        if (total_weight_ > 0.0 && crossed_weight_ / total_weight_ > kMaxCrossedShare) {
            std::ostringstream os;
            os << "crossed per-X intervals carry " << 100.0 * crossed_weight_ / total_weight_
               << "% of the population weight, above the " << 100.0 * kMaxCrossedShare << "% limit";
            throw std::runtime_error(os.str());
        }
        PopulationBound b;
        b.lower = lower_.mean();
        b.upper = upper_.mean();
        b.mc_draws = draws_;
        b.crossed = crossed_;
        if (mc_) {
            b.stderr_lower = lower_.stderr_of_mean();
            b.stderr_upper = upper_.stderr_of_mean();
        }
        if (all_truth_) {
            b.truth = truth_.mean();
            if (mc_) b.stderr_truth = truth_.stderr_of_mean();
        }
        return b;
    }

private:
    bool mc_;
    std::size_t draws_;
    MeanAccumulator lower_;
    MeanAccumulator upper_;
    MeanAccumulator truth_;
    bool all_truth_ = true;
    std::size_t crossed_ = 0;
    double crossed_weight_ = 0.0;
    double total_weight_ = 0.0;
};

std::optional<double> member_truth(const ModelSpec& model, const PopulationMember& m, const CounterfactualQuery& q) {
    if (!m.latent) return std::nullopt;
    return true_tau(model, q, *m.latent);
}

void check_target(const ModelSpec& model, int t) {
    if (t < 1 || t > model.periods()) {
        throw std::invalid_argument("target period " + std::to_string(t) + " outside 1.." +
                                    std::to_string(model.periods()));
    }
}

// tau bounds at y; y at or below the support's infimum gives the certain event.
BoundInterval tau_interval(const ModelSpec& model, const PopulationMember& m, const CounterfactualQuery& q,
                           const BoundOptions& opts) {
    const ExtendedReal inf = model.support().infimum();
    if (ExtendedReal(q.y) <= inf) {
        BoundInterval b;
        b.lower = 1.0;
        b.upper = 1.0;
        b.point_identified = true;
        return b;
    }
    return theorem2_bounds(model, m.regressors, q, m.survival, opts);
}

double tau_truth(const ModelSpec& model, const PopulationMember& m, const CounterfactualQuery& q) {
    if (ExtendedReal(q.y) <= model.support().infimum()) return 1.0;
    return true_tau(model, q, *m.latent);
}

void reject_negative_support(const OutcomeSupport& support) {
    const ExtendedReal inf = support.infimum();
    if (!inf.is_finite() || inf.value() < 0.0) {
        throw std::invalid_argument("asf_bounds: outcome support " + support.describe() +
                                    " contains negative values");
    }
}

}  // namespace

PopulationBound expected_counterfactual_bounds(const Population& pop, const CounterfactualQuery& q,
                                               const BoundOptions& opts) {
    const ModelSpec& model = pop.model();
    check_target(model, q.t);
    BoundAverager avg(pop);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const PopulationMember m = pop.member(i);
        const BoundInterval b = theorem2_bounds(model, m.regressors, q, m.survival, opts);
        avg.add(m.weight, b.lower, b.upper, member_truth(model, m, q));
    }
    return avg.result();
}

std::vector<SweepCell> counterfactual_sweep(const Population& pop, const Regressor& x, double y,
                                            const std::vector<int>& targets, const std::vector<int>& horizons,
                                            bool include_target, const BoundOptions& opts) {
    const ModelSpec& model = pop.model();
    for (int t : targets) check_target(model, t);
    for (int h : horizons) check_target(model, h);
    BoundOptions all = opts;
    all.periods.clear();

    std::vector<BoundAverager> avgs(targets.size() * horizons.size(), BoundAverager(pop));
    std::vector<CounterfactualQuery> queries;
    for (int t : targets) queries.push_back({t, x, y});

    for (std::size_t i = 0; i < pop.size(); ++i) {
        const PopulationMember m = pop.member(i);
        for (std::size_t a = 0; a < queries.size(); ++a) {
            const CounterfactualQuery& q = queries[a];
            const std::vector<BoundInterval> per = per_period_bounds(model, m.regressors, q, m.survival, all);
            const std::optional<double> truth = member_truth(model, m, q);
            const BoundInterval& own = per[static_cast<std::size_t>(q.t - 1)];
            for (std::size_t b = 0; b < horizons.size(); ++b) {
                double lo = 0.0;
                double hi = 1.0;
                for (int s = 1; s <= horizons[b]; ++s) {
                    lo = std::max(lo, per[static_cast<std::size_t>(s - 1)].lower);
                    hi = std::min(hi, per[static_cast<std::size_t>(s - 1)].upper);
                }
                if (include_target) {
                    lo = std::max(lo, own.lower);
                    hi = std::min(hi, own.upper);
                }
                avgs[a * horizons.size() + b].add(m.weight, lo, hi, truth);
            }
        }
    }

    std::vector<SweepCell> out;
    for (std::size_t a = 0; a < targets.size(); ++a) {
        for (std::size_t b = 0; b < horizons.size(); ++b) {
            out.push_back({targets[a], horizons[b], avgs[a * horizons.size() + b].result()});
        }
    }
    return out;
}

PopulationBound asf_bounds(const Population& pop, int t, const Regressor& x, const AsfOptions& opts) {
    const ModelSpec& model = pop.model();
    check_target(model, t);
    const OutcomeSupport& support = model.support();
    reject_negative_support(support);

    if (support.is_finite()) {
        // E[Y] = y_0 + sum_k (y_k - y_{k-1}) P(Y >= y_k).
        const std::vector<double>& pts = support.points();
        BoundAverager avg(pop);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const PopulationMember m = pop.member(i);
            double lo = pts.front();
            double hi = pts.front();
            double truth = pts.front();
            bool crossed = false;
            for (std::size_t k = 1; k < pts.size(); ++k) {
                const CounterfactualQuery q{t, x, pts[k]};
                const BoundInterval b = theorem2_bounds(model, m.regressors, q, m.survival, opts.bounds);
                const double step = pts[k] - pts[k - 1];
                crossed = crossed || b.crossed;
                const double l = b.crossed ? 0.5 * (b.lower + b.upper) : b.lower;
                const double u = b.crossed ? 0.5 * (b.lower + b.upper) : b.upper;
                lo += step * l;
                hi += step * u;
                if (m.latent) truth += step * true_tau(model, q, *m.latent);
            }
            if (crossed) avg.note_crossed(m.weight);
            avg.add(m.weight, lo, hi, m.latent ? std::optional<double>(truth) : std::nullopt);
        }
        return avg.result();
    }

    if (opts.grid_points < 2) throw std::invalid_argument("asf_bounds: need at least 2 grid points");
    double y_max = 0.0;
    if (opts.y_max) {
        y_max = *opts.y_max;
        if (!(y_max > 0.0)) throw std::invalid_argument("asf_bounds: y_max must be positive");
    } else {
        y_max = 1.0;
        for (;;) {
            MeanAccumulator upper;
            for (std::size_t i = 0; i < pop.size(); ++i) {
                const PopulationMember m = pop.member(i);
                const BoundInterval b = tau_interval(model, m, {t, x, y_max}, opts.bounds);
                upper.add(m.weight, b.upper);
            }
            if (upper.mean() < opts.tail_tolerance) break;
            y_max *= 2.0;
            if (y_max > 1e12) throw std::runtime_error("asf_bounds: upper tail does not vanish; cannot truncate");
        }
    }

    const int n = opts.grid_points;
    const double h = y_max / (n - 1);
    BoundAverager avg(pop);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const PopulationMember m = pop.member(i);
        PairwiseSum lo;
        PairwiseSum hi;
        PairwiseSum tr;
        bool crossed = false;
        for (int k = 0; k < n; ++k) {
            const double w = (k == 0 || k == n - 1) ? 0.5 * h : h;
            const CounterfactualQuery q{t, x, k * h};
            const BoundInterval b = tau_interval(model, m, q, opts.bounds);
            const double mid = 0.5 * (b.lower + b.upper);
            crossed = crossed || b.crossed;
            lo.add(w * (b.crossed ? mid : b.lower));
            hi.add(w * (b.crossed ? mid : b.upper));
            if (m.latent) tr.add(w * tau_truth(model, m, q));
        }
        if (crossed) avg.note_crossed(m.weight);
        avg.add(m.weight, lo.total(), hi.total(), m.latent ? std::optional<double>(tr.total()) : std::nullopt);
    }
    return avg.result();
}

PopulationBound ate_bounds(const Population& pop, int t, const Regressor& x1, const Regressor& x0, double y,
                           const BoundOptions& opts) {
    const ModelSpec& model = pop.model();
    check_target(model, t);
    const CounterfactualQuery q1{t, x1, y};
    const CounterfactualQuery q0{t, x0, y};
    BoundAverager avg(pop);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const PopulationMember m = pop.member(i);
        BoundInterval b1 = theorem2_bounds(model, m.regressors, q1, m.survival, opts);
        BoundInterval b0 = theorem2_bounds(model, m.regressors, q0, m.survival, opts);
        if (b1.crossed || b0.crossed) avg.note_crossed(m.weight);
        for (BoundInterval* b : {&b1, &b0}) {
            if (b->crossed) b->lower = b->upper = 0.5 * (b->lower + b->upper);
        }
        std::optional<double> truth;
        if (m.latent) truth = true_tau(model, q1, *m.latent) - true_tau(model, q0, *m.latent);
        avg.add(m.weight, b1.lower - b0.upper, b1.upper - b0.lower, truth);
    }
    return avg.result();
}

}  // namespace cfbounds
