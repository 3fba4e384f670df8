#include "cfbounds/link.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cfbounds {

// ---------------------------------------------------------------------------
// OutcomeSupport

OutcomeSupport OutcomeSupport::finite(std::vector<double> points) {
    if (points.empty()) throw std::invalid_argument("OutcomeSupport: empty finite support");
    std::sort(points.begin(), points.end());
    if (std::adjacent_find(points.begin(), points.end()) != points.end()) {
        throw std::invalid_argument("OutcomeSupport: duplicate support points");
    }
    for (double p : points) {
        if (!std::isfinite(p)) throw std::invalid_argument("OutcomeSupport: non-finite point");
    }
    if (points.size() < 2) {
        throw std::invalid_argument("OutcomeSupport: support must have a point above its infimum");
    }
    OutcomeSupport s;
    s.finite_ = true;
    s.lower_ = points.front();
    s.points_ = std::move(points);
    return s;
}

OutcomeSupport OutcomeSupport::half_line(double lower) {
    OutcomeSupport s;
    s.finite_ = false;
    s.lower_ = lower;
    return s;
}

OutcomeSupport OutcomeSupport::real_line() {
    OutcomeSupport s;
    s.finite_ = false;
    s.lower_ = ExtendedReal::neg_inf();
    return s;
}

ExtendedReal OutcomeSupport::infimum() const { return lower_; }

std::vector<double> OutcomeSupport::lower_points() const {
    if (!finite_) throw std::logic_error("OutcomeSupport: lower_points() on a continuous support");
    return {points_.begin() + 1, points_.end()};
}

bool OutcomeSupport::contains(double y) const {
    if (!std::isfinite(y)) return false;
    if (finite_) return std::binary_search(points_.begin(), points_.end(), y);
    return ExtendedReal(y) >= lower_;
}

bool OutcomeSupport::contains_above_infimum(double y) const {
    return contains(y) && ExtendedReal(y) > lower_;
}

bool operator==(const OutcomeSupport& a, const OutcomeSupport& b) {
    return a.finite_ == b.finite_ && a.points_ == b.points_ && a.lower_ == b.lower_;
}

std::string OutcomeSupport::describe() const {
    std::ostringstream os;
    if (finite_) {
        os << '{';
        for (std::size_t i = 0; i < points_.size(); ++i) os << (i ? "," : "") << points_[i];
        os << '}';
    } else {
        os << '[' << lower_ << ", +inf)";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// LinkFunction

LinkFunction::LinkFunction(Kind kind, OutcomeSupport support)
    : kind_(std::move(kind)), support_(std::move(support)) {}

LinkFunction LinkFunction::binary_threshold(double threshold) {
    if (!std::isfinite(threshold)) throw std::invalid_argument("binary_threshold: non-finite threshold");
    return {BinaryThreshold{threshold}, OutcomeSupport::finite({0.0, 1.0})};
}

LinkFunction LinkFunction::ordered_thresholds(std::vector<double> thresholds) {
    if (thresholds.empty()) throw std::invalid_argument("ordered_thresholds: need J >= 2");
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (!std::isfinite(thresholds[j])) {
            throw std::invalid_argument("ordered_thresholds: non-finite threshold");
        }
        if (j > 0 && !(thresholds[j - 1] < thresholds[j])) {
            throw std::invalid_argument("ordered_thresholds: thresholds must be strictly increasing");
        }
    }
    std::vector<double> points(thresholds.size() + 1);
    for (std::size_t k = 0; k < points.size(); ++k) points[k] = static_cast<double>(k + 1);
    return {OrderedThresholds{std::move(thresholds)}, OutcomeSupport::finite(std::move(points))};
}

LinkFunction LinkFunction::censored_at_zero() {
    return {CensoredAtZero{}, OutcomeSupport::half_line(0.0)};
}

LinkFunction LinkFunction::affine_invertible(double shift) {
    if (!std::isfinite(shift)) throw std::invalid_argument("affine_invertible: non-finite shift");
    return {AffineInvertible{shift}, OutcomeSupport::real_line()};
}

LinkFunction LinkFunction::tabulated(std::vector<double> breakpoints, std::vector<double> values) {
    if (values.size() != breakpoints.size() + 1) {
        throw std::invalid_argument("tabulated: need exactly one more value than breakpoints");
    }
    for (std::size_t k = 0; k < breakpoints.size(); ++k) {
        if (!std::isfinite(breakpoints[k])) throw std::invalid_argument("tabulated: non-finite breakpoint");
        if (k > 0 && !(breakpoints[k - 1] < breakpoints[k])) {
            throw std::invalid_argument("tabulated: breakpoints must be strictly increasing");
        }
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k])) throw std::invalid_argument("tabulated: non-finite value");
        if (k > 0 && values[k] < values[k - 1]) {
            throw std::invalid_argument("tabulated: values must be nondecreasing");
        }
    }
    std::vector<double> points = values;
    points.erase(std::unique(points.begin(), points.end()), points.end());
    auto support = OutcomeSupport::finite(std::move(points));
    return {TabulatedMonotone{std::move(breakpoints), std::move(values)}, std::move(support)};
}

std::string LinkFunction::kind_name() const {
    struct Name {
        std::string operator()(const BinaryThreshold&) const { return "binary"; }
        std::string operator()(const OrderedThresholds&) const { return "ordered"; }
        std::string operator()(const CensoredAtZero&) const { return "censored"; }
        std::string operator()(const AffineInvertible&) const { return "affine"; }
        std::string operator()(const TabulatedMonotone&) const { return "tabulated"; }
    };
    return std::visit(Name{}, kind_);
}

double LinkFunction::evaluate(double v) const {
    if (!std::isfinite(v)) throw std::domain_error("LinkFunction::evaluate: finite argument required");
    struct Eval {
        double v;
        double operator()(const BinaryThreshold& b) const { return v >= b.threshold ? 1.0 : 0.0; }
        double operator()(const OrderedThresholds& o) const {
            auto above = std::upper_bound(o.thresholds.begin(), o.thresholds.end(), v);
            return 1.0 + static_cast<double>(above - o.thresholds.begin());
        }
        double operator()(const CensoredAtZero&) const { return std::max(0.0, v); }
        double operator()(const AffineInvertible& a) const { return v + a.shift; }
        double operator()(const TabulatedMonotone& t) const {
            auto k = std::upper_bound(t.breakpoints.begin(), t.breakpoints.end(), v) - t.breakpoints.begin();
            return t.values[static_cast<std::size_t>(k)];
        }
    };
    return std::visit(Eval{v}, kind_);
}

ExtendedReal LinkFunction::generalized_inverse(double y) const {
    if (!support_.contains_above_infimum(y)) {
        throw std::domain_error("generalized_inverse: y = " + std::to_string(y) +
                                " is not in the support above its infimum " + support_.describe());
    }
    return generalized_inverse_over_support(y);
}

ExtendedReal LinkFunction::generalized_inverse_over_support(double y) const {
    if (!support_.contains(y)) {
        throw std::domain_error("generalized_inverse: y = " + std::to_string(y) +
                                " is outside the support " + support_.describe());
    }
    if (ExtendedReal(y) == support_.infimum()) return ExtendedReal::neg_inf();

    struct Inverse {
        double y;
        ExtendedReal operator()(const BinaryThreshold& b) const { return b.threshold; }
        ExtendedReal operator()(const OrderedThresholds& o) const {
            // y in {2, ..., J}
            return o.thresholds[static_cast<std::size_t>(y) - 2];
        }
        ExtendedReal operator()(const CensoredAtZero&) const { return y; }
        ExtendedReal operator()(const AffineInvertible& a) const { return y - a.shift; }
        ExtendedReal operator()(const TabulatedMonotone& t) const {
            for (std::size_t k = 1; k < t.values.size(); ++k) {
                if (t.values[k] >= y) return t.breakpoints[k - 1];
            }
            return ExtendedReal::pos_inf();
        }
    };
    return std::visit(Inverse{y}, kind_);
}

std::optional<double> LinkFunction::outcome_at_inverse(double latent) const {
    if (support_.is_finite()) return std::nullopt;
    if (const auto* a = std::get_if<AffineInvertible>(&kind_)) return latent + a->shift;
    if (std::holds_alternative<CensoredAtZero>(kind_)) {
        if (latent > 0.0) return latent;
        return std::nullopt;
    }
    return std::nullopt;
}

bool round_trip_check(const LinkFunction& link, double y, double eps) {
    const ExtendedReal inv = link.generalized_inverse(y);
    if (!inv.is_finite()) return false;
    const double v = inv.value();
    return link.evaluate(v) >= y && link.evaluate(v - eps) < y;
}

}  // namespace cfbounds
