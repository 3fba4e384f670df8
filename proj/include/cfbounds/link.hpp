#pragma once

// Period-specific transformation functions (links) mapping the latent index
// to the observed outcome, and their generalized inverses
//   h^-(y) = inf{ v : h(v) >= y }.
// Every link is weakly increasing and right-continuous.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cfbounds/extended_real.hpp"

namespace cfbounds {

/// Support of the observed outcome: an ordered finite set of values, or a
/// real interval whose lower end may be unbounded.
class OutcomeSupport {
public:
    /// Finite support; values are sorted and must be distinct.
    static OutcomeSupport finite(std::vector<double> points);
    /// Interval [lower, +inf) with a finite, attained lower end.
    static OutcomeSupport half_line(double lower);
    /// The whole real line.
    static OutcomeSupport real_line();

    [[nodiscard]] bool is_finite() const noexcept { return finite_; }
    [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }

    /// inf of the support (NEG_INF for the real line).
    [[nodiscard]] ExtendedReal infimum() const;

    /// Points of the support with the infimum removed; finite supports only.
    [[nodiscard]] std::vector<double> lower_points() const;

    [[nodiscard]] bool contains(double y) const;
    /// Membership in the support with its infimum removed.
    [[nodiscard]] bool contains_above_infimum(double y) const;

    friend bool operator==(const OutcomeSupport& a, const OutcomeSupport& b);

    [[nodiscard]] std::string describe() const;

private:
    bool finite_ = true;
    std::vector<double> points_;
    ExtendedReal lower_ = 0.0;
};

struct BinaryThreshold {
    double threshold;
};

/// Thresholds for outcomes 2..J; outcome 1 is attained below the first.
struct OrderedThresholds {
    std::vector<double> thresholds;
};

struct CensoredAtZero {};

/// h(v) = v + shift.
struct AffineInvertible {
    double shift;
};

/// Right-continuous step function: values[0] below breakpoints[0], and
/// values[k] on [breakpoints[k-1], breakpoints[k]).
struct TabulatedMonotone {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

class LinkFunction {
public:
    using Kind = std::variant<BinaryThreshold, OrderedThresholds, CensoredAtZero,
                              AffineInvertible, TabulatedMonotone>;

    static LinkFunction binary_threshold(double threshold);
    /// Ordered choice with J = thresholds.size() + 1 outcomes {1, ..., J}.
    /// Thresholds must be strictly increasing.
    static LinkFunction ordered_thresholds(std::vector<double> thresholds);
    static LinkFunction censored_at_zero();
    static LinkFunction affine_invertible(double shift);
    /// Breakpoints strictly increasing; values nondecreasing with
    /// values.size() == breakpoints.size() + 1.
    static LinkFunction tabulated(std::vector<double> breakpoints, std::vector<double> values);

    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
    [[nodiscard]] const OutcomeSupport& support() const noexcept { return support_; }
    [[nodiscard]] std::string kind_name() const;

    /// h(v) for finite v.
    [[nodiscard]] double evaluate(double v) const;

    /// h^-(y) for y in the support minus its infimum. Throws
    /// std::domain_error for y = inf(support) or y outside the support.
    [[nodiscard]] ExtendedReal generalized_inverse(double y) const;

    /// Like generalized_inverse, but also accepts y = inf(support), where
    /// the answer is NEG_INF. Only useful to exhibit the trivial bounds that
    /// the restriction to the support above its infimum avoids.
    [[nodiscard]] ExtendedReal generalized_inverse_over_support(double y) const;

    /// For continuous supports: the outcome y' above the infimum with
    /// h^-(y') == latent, when one exists. Always nullopt for finite supports.
    [[nodiscard]] std::optional<double> outcome_at_inverse(double latent) const;

    [[nodiscard]] bool is_invertible() const noexcept {
        return std::holds_alternative<AffineInvertible>(kind_);
    }

private:
    LinkFunction(Kind kind, OutcomeSupport support);

    Kind kind_;
    OutcomeSupport support_;
};

/// True iff h(h^-(y)) >= y and h(h^-(y) - eps) < y.
/// Precondition: y above the infimum with h^-(y) finite.
[[nodiscard]] bool round_trip_check(const LinkFunction& link, double y, double eps = 1e-9);

}  // namespace cfbounds
