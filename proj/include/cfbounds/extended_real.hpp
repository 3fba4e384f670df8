#pragma once

#include <cmath>
#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cfbounds {

/// A real number or one of the two signed infinities.
///
/// Infinities are explicit states rather than IEEE infinities so that every
/// comparison against an unbounded index is a visible code path. A finite
/// ExtendedReal never holds a NaN or an IEEE infinity.
class ExtendedReal {
public:
    enum class Kind { NegInf, Finite, PosInf };

    constexpr ExtendedReal() = default;
    // NOLINTNEXTLINE(google-explicit-constructor)
    ExtendedReal(double value) : kind_(Kind::Finite), value_(value) {
        if (!std::isfinite(value)) {
            throw std::domain_error("ExtendedReal: finite value required, got " +
                                    std::to_string(value));
        }
    }

    static constexpr ExtendedReal neg_inf() { return ExtendedReal(Kind::NegInf); }
    static constexpr ExtendedReal pos_inf() { return ExtendedReal(Kind::PosInf); }

    [[nodiscard]] constexpr Kind kind() const noexcept { return kind_; }
    [[nodiscard]] constexpr bool is_finite() const noexcept { return kind_ == Kind::Finite; }
    [[nodiscard]] constexpr bool is_neg_inf() const noexcept { return kind_ == Kind::NegInf; }
    [[nodiscard]] constexpr bool is_pos_inf() const noexcept { return kind_ == Kind::PosInf; }

    /// Finite payload; throws on an infinity.
    [[nodiscard]] double value() const {
        if (!is_finite()) throw std::domain_error("ExtendedReal: value() on an infinity");
        return value_;
    }

    /// IEEE view, for output and for callers that want plain doubles.
    [[nodiscard]] double to_double() const noexcept;

    /// Sign of the value: -1, 0 or +1.
    [[nodiscard]] int sign() const noexcept;

    friend std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) noexcept;
    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept;

    friend ExtendedReal operator-(const ExtendedReal& a) noexcept;

    /// finite +/- extended keeps the infinity; inf - inf of the same sign
    /// (and inf + inf of opposite signs) is undefined and throws.
    friend ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b);
    friend ExtendedReal operator-(const ExtendedReal& a, const ExtendedReal& b);

    friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x);

private:
    constexpr explicit ExtendedReal(Kind k) : kind_(k) {}

    Kind kind_ = Kind::Finite;
    double value_ = 0.0;
};

std::string to_string(const ExtendedReal& x);

}  // namespace cfbounds
