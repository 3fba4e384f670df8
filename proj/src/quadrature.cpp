#include "cfbounds/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace cfbounds {

namespace {

constexpr int kMaxNewton = 100;

// Newton iteration on the orthonormal Hermite recurrence, starting from the
// usual asymptotic guesses for the largest roots.
QuadratureRule build_gauss_hermite(int n) {
    constexpr double pim4 = 0.7511255444649425;  // pi^(-1/4)
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[static_cast<std::size_t>(i - 2)];
        }
        double pp = 0.0;
        int it = 0;
        for (; it < kMaxNewton; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) break;
        }
        if (it == kMaxNewton) throw std::runtime_error("gauss_hermite: Newton iteration did not converge");
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = z;
        rule.nodes[hi] = -z;
        rule.weights[lo] = 2.0 / (pp * pp);
        rule.weights[hi] = rule.weights[lo];
    }
    return rule;
}

QuadratureRule build_gauss_legendre(int n) {
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        int it = 0;
        for (; it < kMaxNewton; ++it) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15) break;
        }
        if (it == kMaxNewton) throw std::runtime_error("gauss_legendre: Newton iteration did not converge");
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -z;
        rule.nodes[hi] = z;
        rule.weights[lo] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[hi] = rule.weights[lo];
    }
    return rule;
}

template <typename Build>
const QuadratureRule& cached(std::map<int, QuadratureRule>& cache, std::mutex& mu, int order, Build build) {
    if (order < 1) throw std::invalid_argument("quadrature order must be positive");
    std::lock_guard lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build(order)).first;
    return it->second;
}

}  // namespace

const QuadratureRule& gauss_hermite(int order) {
    static std::map<int, QuadratureRule> cache;
    static std::mutex mu;
    return cached(cache, mu, order, build_gauss_hermite);
}

const QuadratureRule& gauss_legendre(int order) {
    static std::map<int, QuadratureRule> cache;
    static std::mutex mu;
    return cached(cache, mu, order, build_gauss_legendre);
}

QuadratureRule gauss_legendre(int order, double a, double b) {
    const QuadratureRule& ref = gauss_legendre(order);
    QuadratureRule out = ref;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        out.nodes[i] = mid + half * ref.nodes[i];
        out.weights[i] = half * ref.weights[i];
    }
    return out;
}

}  // namespace cfbounds
