#include "cfbounds/extended_real.hpp"

#include <limits>
#include <sstream>

namespace cfbounds {

double ExtendedReal::to_double() const noexcept {
    switch (kind_) {
        case Kind::NegInf: return -std::numeric_limits<double>::infinity();
        case Kind::PosInf: return std::numeric_limits<double>::infinity();
        case Kind::Finite: break;
    }
    return value_;
}

int ExtendedReal::sign() const noexcept {
    switch (kind_) {
        case Kind::NegInf: return -1;
        case Kind::PosInf: return 1;
        case Kind::Finite: break;
    }
    return (value_ > 0.0) - (value_ < 0.0);
}

namespace {
int rank(ExtendedReal::Kind k) {
    switch (k) {
        case ExtendedReal::Kind::NegInf: return 0;
        case ExtendedReal::Kind::Finite: return 1;
        case ExtendedReal::Kind::PosInf: return 2;
    }
    return 1;
}
}  // namespace

std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    if (a.kind_ != b.kind_) return rank(a.kind_) <=> rank(b.kind_);
    if (a.is_finite()) return a.value_ <=> b.value_;
    return std::partial_ordering::equivalent;
}

bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    return (a <=> b) == std::partial_ordering::equivalent;
}

ExtendedReal operator-(const ExtendedReal& a) noexcept {
    switch (a.kind_) {
        case ExtendedReal::Kind::NegInf: return ExtendedReal::pos_inf();
        case ExtendedReal::Kind::PosInf: return ExtendedReal::neg_inf();
        case ExtendedReal::Kind::Finite: break;
    }
    return ExtendedReal(-a.value_);
}

ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.is_finite() && b.is_finite()) return ExtendedReal(a.value_ + b.value_);
    if (a.is_finite()) return b;
    if (b.is_finite()) return a;
    if (a.kind_ == b.kind_) return a;
    throw std::domain_error("ExtendedReal: +inf + -inf is undefined");
}

ExtendedReal operator-(const ExtendedReal& a, const ExtendedReal& b) { return a + (-b); }

std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
    switch (x.kind_) {
        case ExtendedReal::Kind::NegInf: return os << "-inf";
        case ExtendedReal::Kind::PosInf: return os << "+inf";
        case ExtendedReal::Kind::Finite: break;
    }
    return os << x.value_;
}

std::string to_string(const ExtendedReal& x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace cfbounds
