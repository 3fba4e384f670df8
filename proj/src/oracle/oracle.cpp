#include "cfbounds/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace cfbounds::oracle {

namespace {

using boost::multiprecision::cpp_rational;

constexpr double kInf = std::numeric_limits<double>::infinity();

cpp_rational to_rational(double d) {
    if (!std::isfinite(d)) throw std::invalid_argument("oracle: non-finite value has no rational form");
    if (d == 0.0) return 0;
    int exp = 0;
    const double mant = std::frexp(d, &exp);  // d = mant * 2^exp, 0.5 <= |mant| < 1
    const auto m = static_cast<long long>(std::ldexp(mant, 53));
    cpp_rational r = m;
    const int shift = exp - 53;
    cpp_rational two_pow = 1;
    for (int i = 0; i < std::abs(shift); ++i) two_pow *= 2;
    if (shift >= 0) return r * two_pow;
    return r / two_pow;
}

/// Extended rational: -inf, finite, +inf.
struct XRational {
    int kind = 0;  // -1, 0, +1
    cpp_rational value = 0;
};

int compare(const XRational& a, const XRational& b) {
    if (a.kind != 0 || b.kind != 0) {
        if (a.kind == b.kind) return 0;
        return a.kind < b.kind ? -1 : 1;
    }
    if (a.value == b.value) return 0;
    return a.value < b.value ? -1 : 1;
}

struct Steps {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

Steps steps_of(const LinkFunction& link) {
    if (const auto* b = std::get_if<BinaryThreshold>(&link.kind())) return {{b->threshold}, {0.0, 1.0}};
    if (const auto* o = std::get_if<OrderedThresholds>(&link.kind())) {
        Steps s{o->thresholds, {}};
        for (std::size_t j = 0; j <= o->thresholds.size(); ++j) s.values.push_back(1.0 + static_cast<double>(j));
        return s;
    }
    if (const auto* t = std::get_if<TabulatedMonotone>(&link.kind())) return {t->breakpoints, t->values};
    throw std::invalid_argument("oracle: only step links with finite support are supported");
}

double step_value(const Steps& s, double v) {
    std::size_t k = 0;
    for (double b : s.breakpoints) k += b <= v ? 1 : 0;
    return s.values[k];
}

XRational rational_index(const Regressor& x, const std::vector<double>& beta, const ExtendedReal& inverse) {
    if (inverse.is_pos_inf()) return {-1, 0};
    if (inverse.is_neg_inf()) return {1, 0};
    cpp_rational acc = 0;
    for (std::size_t k = 0; k < beta.size(); ++k) acc += to_rational(x.at(k)) * to_rational(beta[k]);
    return {0, acc - to_rational(inverse.value())};
}

ExtendedReal to_extended(const XRational& r) {
    if (r.kind < 0) return ExtendedReal::neg_inf();
    if (r.kind > 0) return ExtendedReal::pos_inf();
    return static_cast<double>(r.value);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14, &err);
}

double oracle_logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double gaussian_density(double v, double mean, double var) {
    const double z = (v - mean) / std::sqrt(var);
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi * var);
}

IndexComparison classify_rational(const XRational& obs, const XRational& cf) {
    const int c = compare(obs, cf);
    if (c == 0) return IndexComparison::Both;
    return c > 0 ? IndexComparison::Upper : IndexComparison::Lower;
}

struct OraclePair {
    int period;
    double outcome;
    XRational obs;
    IndexComparison cls;
    double p;
};

struct OracleInterval {
    double lower = 0.0;
    double upper = 1.0;
    bool point_identified = false;
    std::optional<Witness> lower_witness;
    std::optional<Witness> upper_witness;
};

// sup over the lower set and inf over the upper set; witnesses are the first
// pairs in (s, y') order attaining them.
OracleInterval extremes(const std::vector<OraclePair>& pairs, const std::vector<int>& periods) {
    double sup = -kInf;
    double inf = kInf;
    OracleInterval out;
    for (const auto& p : pairs) {
        if (std::find(periods.begin(), periods.end(), p.period) == periods.end()) continue;
        if (p.cls != IndexComparison::Upper) sup = std::max(sup, p.p);
        if (p.cls != IndexComparison::Lower) inf = std::min(inf, p.p);
        if (p.cls == IndexComparison::Both && p.obs.kind == 0) out.point_identified = true;
    }
    for (const auto& p : pairs) {
        if (std::find(periods.begin(), periods.end(), p.period) == periods.end()) continue;
        if (!out.lower_witness && p.cls != IndexComparison::Upper && p.p == sup) {
            out.lower_witness = Witness{p.period, p.outcome};
        }
        if (!out.upper_witness && p.cls != IndexComparison::Lower && p.p == inf) {
            out.upper_witness = Witness{p.period, p.outcome};
        }
    }
    out.lower = std::clamp(sup, 0.0, 1.0);
    out.upper = std::clamp(inf, 0.0, 1.0);
    return out;
}

std::string witness_text(const std::optional<Witness>& w) {
    if (!w) return "none";
    std::ostringstream os;
    os << "(" << w->period << ", " << w->outcome << ")";
    return os.str();
}

void compare_interval(const OracleInterval& o, const BoundInterval& b, const std::string& label,
                      std::vector<Mismatch>& out) {
    auto fail = [&](const std::string& what, const std::optional<Witness>& w) {
        out.push_back({label + ": " + what, w ? w->period : 0, w ? w->outcome : 0.0});
    };
    if (o.lower != b.lower) {
        std::ostringstream os;
        os << "lower endpoint " << b.lower << " != oracle " << o.lower;
        fail(os.str(), o.lower_witness);
    }
    if (o.upper != b.upper) {
        std::ostringstream os;
        os << "upper endpoint " << b.upper << " != oracle " << o.upper;
        fail(os.str(), o.upper_witness);
    }
    if (o.lower_witness != b.lower_witness) {
        fail("lower witness " + witness_text(b.lower_witness) + " != oracle " + witness_text(o.lower_witness),
             o.lower_witness);
    }
    if (o.upper_witness != b.upper_witness) {
        fail("upper witness " + witness_text(b.upper_witness) + " != oracle " + witness_text(o.upper_witness),
             o.upper_witness);
    }
    if (o.point_identified != b.point_identified) fail("point-identification flag differs", std::nullopt);
}

template <typename T>
T pick(std::mt19937_64& rng, const std::vector<T>& v) {
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng)];
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
}

double dyadic(std::mt19937_64& rng, int lo_num, int hi_num, double denom) {
    return uniform_int(rng, lo_num, hi_num) / denom;
}

std::vector<double> distinct_dyadics(std::mt19937_64& rng, std::size_t n, int lo_num, int hi_num, double denom) {
    std::vector<int> pool;
    for (int k = lo_num; k <= hi_num; ++k) pool.push_back(k);
    std::shuffle(pool.begin(), pool.end(), rng);
    if (pool.size() < n) throw std::logic_error("oracle: dyadic pool too small");
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(pool[i] / denom);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

void SmallInstance::validate() const {
    if (cells.empty() || cells.size() > 4) throw std::invalid_argument("SmallInstance: need 1 to 4 cells");
    if (weights.size() != cells.size() || laws.size() != cells.size()) {
        throw std::invalid_argument("SmallInstance: one weight and one law per cell");
    }
    if (model.periods() > 8) throw std::invalid_argument("SmallInstance: at most 8 periods");
    if (!model.support().is_finite() || model.support().points().size() > 8) {
        throw std::invalid_argument("SmallInstance: finite support of at most 8 values required");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].periods() != model.periods()) throw std::invalid_argument("SmallInstance: cell length != T");
        if (!(weights[i] >= 0.0)) throw std::invalid_argument("SmallInstance: negative weight");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("SmallInstance: weights must sum to 1");
    for (const auto& l : model.links()) steps_of(l);
}

double law_cdf(const OracleLaw& law, const ExtendedReal& c) {
    if (c.is_neg_inf()) return 0.0;
    if (c.is_pos_inf()) return 1.0;
    const double x = c.value();
    if (const auto* pm = std::get_if<PointMass>(&law)) return x >= pm->at ? 1.0 : 0.0;
    if (const auto* g = std::get_if<GaussianConvolution>(&law)) {
        auto f = [g](double v) { return gaussian_density(v, g->mean, g->variance); };
        // Integrate the thinner tail for accuracy.
        if (x <= g->mean) return integrate(f, -kInf, x);
        return 1.0 - integrate(f, x, kInf);
    }
    const auto& l = std::get<LogisticNormalMixture>(law);
    auto f = [&l, x](double a) { return oracle_logistic(x + a) * gaussian_density(a, l.normal_mean, l.normal_variance); };
    return std::clamp(integrate(f, -kInf, kInf), 0.0, 1.0);
}

std::optional<LatentShiftDistribution> as_latent(const OracleLaw& law) {
    if (const auto* g = std::get_if<GaussianConvolution>(&law)) return LatentShiftDistribution{*g};
    if (const auto* l = std::get_if<LogisticNormalMixture>(&law)) return LatentShiftDistribution{*l};
    return std::nullopt;
}

ExtendedReal step_inverse(const LinkFunction& link, double y) {
    const Steps s = steps_of(link);
    if (!(y > s.values.front())) throw std::domain_error("step_inverse: y must exceed the infimum");
    std::optional<double> best;
    for (double b : s.breakpoints) {
        if (step_value(s, b) >= y && (!best || b < *best)) best = b;
    }
    return best ? ExtendedReal(*best) : ExtendedReal::pos_inf();
}

double brute_force_tau(const SmallInstance& inst, std::size_t cell, const CounterfactualQuery& q) {
    const XRational cf = rational_index(q.x, inst.model.beta(), step_inverse(inst.model.link(q.t), q.y));
    return law_cdf(inst.laws.at(cell), to_extended(cf));
}

SurvivalTable brute_force_table(const SmallInstance& inst, std::size_t cell) {
    const RegressorSequence& X = inst.cells.at(cell);
    const std::vector<double> outcomes = inst.model.support().lower_points();
    std::vector<std::vector<double>> rows;
    for (int s = 1; s <= inst.model.periods(); ++s) {
        std::vector<double> row;
        for (double yp : outcomes) {
            const XRational obs = rational_index(X.at(s), inst.model.beta(), step_inverse(inst.model.link(s), yp));
            row.push_back(law_cdf(inst.laws.at(cell), to_extended(obs)));
        }
        rows.push_back(std::move(row));
    }
    return {outcomes, std::move(rows)};
}

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double cell_density(const std::array<int, 2>& x, double a) {
    const double p = std_normal_cdf(a);
    double d = gaussian_density(a, 0.0, 1.0);
    for (int xt : x) d *= xt == 1 ? p : 1.0 - p;
    return d;
}

}  // namespace

double discrete_cell_probability(const std::array<int, 2>& x) {
    return integrate([&x](double a) { return cell_density(x, a); }, -kInf, kInf);
}

double discrete_cell_cdf(const std::array<int, 2>& x, double c) {
    const double num =
        integrate([&x, c](double a) { return std_normal_cdf(a + c) * cell_density(x, a); }, -kInf, kInf);
    return num / discrete_cell_probability(x);
}

double reference_normal_cdf(double z) {
    using boost::multiprecision::cpp_bin_float_50;
    const cpp_bin_float_50 x = z;
    const cpp_bin_float_50 r = boost::math::erfc(-x / boost::multiprecision::sqrt(cpp_bin_float_50(2))) / 2;
    return static_cast<double>(r);
}

std::string BoundCheckReport::describe() const {
    std::ostringstream os;
    os << "[" << lower << ", " << upper << "] tau=" << tau << (point_identified ? " point-identified" : "");
    for (const auto& m : mismatches) os << "\n  " << m.what << " at (s=" << m.period << ", y'=" << m.outcome << ")";
    return os.str();
}

BoundCheckReport brute_force_bound_check(const SmallInstance& inst, std::size_t cell, const CounterfactualQuery& q,
                                         double quad_slack) {
    inst.validate();
    const ModelSpec& model = inst.model;
    const RegressorSequence& X = inst.cells.at(cell);
    const SurvivalTable table = brute_force_table(inst, cell);
    BoundCheckReport report;
    auto& bad = report.mismatches;

    const XRational cf = rational_index(q.x, model.beta(), step_inverse(model.link(q.t), q.y));
    std::vector<OraclePair> pairs;
    std::vector<int> all;
    for (int s = 1; s <= model.periods(); ++s) {
        all.push_back(s);
        const auto& row = table.row(s);
        const auto& outs = table.outcomes();
        for (std::size_t k = 0; k < outs.size(); ++k) {
            const XRational obs = rational_index(X.at(s), model.beta(), step_inverse(model.link(s), outs[k]));
            pairs.push_back({s, outs[k], obs, classify_rational(obs, cf), row[k]});
        }
    }

    const BoundOptions exact;
    const auto main_pairs = classify_pairs(model, X, q, table, all, exact);
    if (main_pairs.size() != pairs.size()) {
        bad.push_back({"pair count " + std::to_string(main_pairs.size()) + " != oracle " +
                           std::to_string(pairs.size()),
                       0, 0.0});
    } else {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto& m = main_pairs[i];
            const auto& o = pairs[i];
            if (m.period != o.period || m.outcome != o.outcome) {
                bad.push_back({"pair order differs", o.period, o.outcome});
            } else if (m.comparison != o.cls) {
                bad.push_back({"classified " + to_string(m.comparison) + ", oracle says " + to_string(o.cls),
                               o.period, o.outcome});
            } else if (!(m.observed == to_extended(o.obs))) {
                bad.push_back({"observed index differs", o.period, o.outcome});
            }
        }
    }

    const OracleInterval o2 = extremes(pairs, all);
    const BoundInterval t2 = theorem2_bounds(model, X, q, table, exact);
    compare_interval(o2, t2, "cross-period", bad);

    const OracleInterval o1 = extremes(pairs, {q.t});
    const BoundInterval t1 = theorem1_bounds(model, X, q, table, exact);
    compare_interval(o1, t1, "same-period", bad);

    report.lower = o2.lower;
    report.upper = o2.upper;
    report.point_identified = o2.point_identified;
    report.tau = brute_force_tau(inst, cell, q);
    if (!(report.tau >= o2.lower - quad_slack && report.tau <= o2.upper + quad_slack)) {
        std::ostringstream os;
        os << "tau " << report.tau << " outside the cross-period interval";
        bad.push_back({os.str(), q.t, q.y});
    }
    if (t2.lower < t1.lower || t2.upper > t1.upper) bad.push_back({"cross-period interval not inside same-period", q.t, q.y});

    double prev_lo = -kInf;
    double prev_hi = kInf;
    for (int tp = 1; tp <= model.periods(); ++tp) {
        BoundOptions opts;
        opts.periods = first_periods(tp, q.t, true);
        const BoundInterval b = theorem2_bounds(model, X, q, table, opts);
        if (b.lower < prev_lo || b.upper > prev_hi) {
            bad.push_back({"interval widens when period " + std::to_string(tp) + " is added", tp, q.y});
        }
        const OracleInterval ob = extremes(pairs, opts.periods);
        if (ob.lower != b.lower || ob.upper != b.upper) {
            bad.push_back({"prefix interval through period " + std::to_string(tp) + " differs from oracle", tp, q.y});
        }
        prev_lo = b.lower;
        prev_hi = b.upper;
    }
    return report;
}

SmallInstance random_small_instance(std::mt19937_64& rng) {
    const int T = uniform_int(rng, 1, 8);
    const int kind = uniform_int(rng, 0, 2);
    const std::size_t dim = static_cast<std::size_t>(uniform_int(rng, 1, 2));
    std::vector<double> beta;
    for (std::size_t k = 0; k < dim; ++k) beta.push_back(dyadic(rng, -8, 8, 4.0));

    std::vector<LinkFunction> links;
    if (kind == 0) {
        for (int t = 0; t < T; ++t) links.push_back(LinkFunction::binary_threshold(dyadic(rng, -8, 8, 4.0)));
    } else if (kind == 1) {
        const auto J = static_cast<std::size_t>(uniform_int(rng, 2, 8));
        for (int t = 0; t < T; ++t) {
            links.push_back(LinkFunction::ordered_thresholds(distinct_dyadics(rng, J - 1, -12, 12, 4.0)));
        }
    } else {
        const auto J = static_cast<std::size_t>(uniform_int(rng, 2, 8));
        const std::vector<double> points = distinct_dyadics(rng, J, 0, 10, 2.0);
        for (int t = 0; t < T; ++t) {
            std::vector<double> values = points;
            const int extra = uniform_int(rng, 0, 2);
            for (int e = 0; e < extra; ++e) values.push_back(pick(rng, points));
            std::sort(values.begin(), values.end());
            links.push_back(LinkFunction::tabulated(distinct_dyadics(rng, values.size() - 1, -12, 12, 4.0), values));
        }
    }

    SmallInstance inst{ModelSpec(beta, std::move(links)), {}, {}, {}};
    const int n = uniform_int(rng, 1, 4);
    for (int i = 0; i < n; ++i) {
        std::vector<Regressor> xs;
        for (int t = 0; t < T; ++t) {
            Regressor x;
            for (std::size_t k = 0; k < dim; ++k) x.push_back(dyadic(rng, -4, 4, 2.0));
            xs.push_back(std::move(x));
        }
        inst.cells.emplace_back(std::move(xs));
        inst.weights.push_back(1.0 / n);
        const int r = uniform_int(rng, 0, 9);
        if (r <= 5) {
            inst.laws.emplace_back(GaussianConvolution{dyadic(rng, -4, 4, 4.0), pick(rng, std::vector<double>{0.5, 1.0, 2.0})});
        } else if (r <= 8) {
            inst.laws.emplace_back(LogisticNormalMixture{dyadic(rng, -4, 4, 4.0), pick(rng, std::vector<double>{0.25, 1.0}), 64});
        } else {
            inst.laws.emplace_back(PointMass{dyadic(rng, -8, 8, 4.0)});
        }
    }
    // 1/3 does not sum to exactly 1 in binary; renormalize the last weight.
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < inst.weights.size(); ++i) head += inst.weights[i];
    inst.weights.back() = 1.0 - head;
    return inst;
}

CounterfactualQuery random_query(const SmallInstance& inst, std::mt19937_64& rng) {
    CounterfactualQuery q;
    q.t = uniform_int(rng, 1, inst.model.periods());
    if (uniform_int(rng, 0, 1) == 0) {
        const auto& cell = inst.cells[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(inst.cells.size()) - 1))];
        q.x = cell.at(uniform_int(rng, 1, inst.model.periods()));
    } else {
        for (std::size_t k = 0; k < inst.model.dimension(); ++k) q.x.push_back(dyadic(rng, -4, 4, 2.0));
    }
    q.y = pick(rng, inst.model.support().lower_points());
    return q;
}

}  // namespace cfbounds::oracle
