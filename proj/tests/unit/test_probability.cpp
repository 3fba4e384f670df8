#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cfbounds/dgp.hpp"
#include "cfbounds/probability.hpp"
#include "cfbounds/quadrature.hpp"

using namespace cfbounds;

TEST_SUITE("quadrature") {
    TEST_CASE("Gauss-Hermite rule") {
        const auto& gh = gauss_hermite(64);
        REQUIRE(gh.nodes.size() == 64);
        double wsum = 0.0;
        double second = 0.0;
        for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
            wsum += gh.weights[i];
            second += gh.weights[i] * gh.nodes[i] * gh.nodes[i];
        }
        CHECK(wsum == doctest::Approx(1.7724538509055157).epsilon(1e-13));
        CHECK(second == doctest::Approx(1.7724538509055157 / 2.0).epsilon(1e-13));
        CHECK(*std::max_element(gh.nodes.begin(), gh.nodes.end()) ==
              doctest::Approx(10.526123167960547).epsilon(1e-12));
        CHECK(&gauss_hermite(64) == &gh);
    }

    TEST_CASE("Gauss-Legendre rule") {
        const auto rule = gauss_legendre(256, -8.0, 8.0);
        double integral = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) integral += rule.weights[i] * normal_pdf(rule.nodes[i]);
        CHECK(integral == doctest::Approx(1.0 - 2.0 * 6.22096057427174e-16).epsilon(1e-14));
        const auto& base = gauss_legendre(5);
        double cubic = 0.0;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) cubic += base.weights[i] * std::pow(base.nodes[i], 8);
        CHECK(cubic == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    }
}

TEST_SUITE("probability") {
    TEST_CASE("normal CDF accuracy") {
        CHECK(normal_cdf(0.0) == 0.5);
        CHECK(normal_cdf(-8.0) == doctest::Approx(6.22096057427174e-16).epsilon(1e-12));
        CHECK(std::abs(normal_cdf(3.0) - 0.9986501019683699) < 1e-15);
        CHECK(std::abs(normal_cdf(std::numbers::sqrt2) - 0.9213503964748575) < 1e-15);
        CHECK(std::abs(logistic_cdf(0.0) - 0.5) < 1e-16);
    }

    TEST_CASE("Gaussian convolution") {
        CHECK(survival_cdf(GaussianConvolution{0.0, 2.0}, 0.0) == 0.5);
        CHECK(std::abs(survival_cdf(GaussianConvolution{0.0, 2.0}, 1.0) - (1.0 - 0.23975006109347674)) < 1e-12);
        CHECK(survival_cdf(GaussianConvolution{0.0, 2.0}, ExtendedReal::neg_inf()) == 0.0);
        CHECK(survival_cdf(GaussianConvolution{0.0, 2.0}, ExtendedReal::pos_inf()) == 1.0);
        CHECK_THROWS_AS(validate(GaussianConvolution{0.0, 0.0}), std::invalid_argument);
    }

    TEST_CASE("logistic-normal mixture") {
        CHECK(std::abs(survival_cdf(LogisticNormalMixture{0.0, 1.0, 64}, 0.0) - 0.5) < 1e-14);
        CHECK(std::abs(survival_cdf(LogisticNormalMixture{-0.2, 1.0, 64}, 0.3) - 0.5206517023627641) < 1e-10);
        CHECK(std::abs(survival_cdf(LogisticNormalMixture{0.4, 2.5, 64}, -1.1) - 0.3813366504419409) < 1e-10);
        for (double c = -6.0; c <= 6.0; c += 0.25) {
            for (double m : {-0.5, 0.0, 0.45}) {
                const double a = survival_cdf(LogisticNormalMixture{m, 1.0, 64}, c);
                const double b = survival_cdf(LogisticNormalMixture{m, 1.0, 128}, c);
                CHECK(std::abs(a - b) <= 1e-9);
            }
        }
    }

    TEST_CASE("fixed-effect mixture") {
        const ProbitFixedEffectMixture mix{{-1.0, 2.0}, {0.25, 0.75}};
        CHECK(survival_cdf(mix, 0.5) == doctest::Approx(0.25 * normal_cdf(-0.5) + 0.75 * normal_cdf(2.5)));
        CHECK_THROWS_AS(validate(ProbitFixedEffectMixture{{0.0}, {0.5}}), std::invalid_argument);
    }

    TEST_CASE("CDFs are nondecreasing") {
        const std::vector<LatentShiftDistribution> laws{GaussianConvolution{0.3, 0.5},
                                                        LogisticNormalMixture{-0.4, 1.7, 64},
                                                        ProbitFixedEffectMixture{{0.0, 1.0}, {0.5, 0.5}}};
        for (const auto& law : laws) {
            double prev = 0.0;
            for (double c = -12.0; c <= 12.0; c += 0.05) {
                const double v = survival_cdf(law, c);
                CHECK(v >= prev);
                prev = v;
            }
        }
    }

    TEST_CASE("exact survival tables for the continuous-regressor design") {
        ProbitContinuousDesign d;
        d.time_effects = false;
        const ModelSpec m = d.model();
        std::vector<double> zeros(20, 0.0);
        const auto X0 = RegressorSequence::scalar(zeros);
        CHECK(exact_survival_table(m, X0, d.latent_law(X0)).probability(3, 1.0) == 0.5);

        std::vector<double> ones(20, 1.0);
        const auto X1 = RegressorSequence::scalar(ones);
        CHECK(std::abs(exact_survival_table(m, X1, d.latent_law(X1)).probability(1, 1.0) - 0.9213503964748575) <
              1e-12);

        // x = 0 at a period with lambda_t = 1, X_1 = 0: Phi(-1/sqrt 2).
        ProbitContinuousDesign shifted;
        const ModelSpec mt = shifted.model();
        const int t = 19;
        REQUIRE(shifted.threshold(t) == 1.0);
        CHECK(std::abs(true_tau(mt, {t, {0.0}, 1.0}, shifted.latent_law(X0)) - 0.23975006109347674) < 1e-12);
    }

    TEST_CASE("entries are nonincreasing in y'") {
        const ModelSpec m({1.0}, {LinkFunction::ordered_thresholds({-1.0, 0.0, 0.5, 2.0}),
                                  LinkFunction::ordered_thresholds({-0.3, 0.1, 0.2, 0.9})});
        const auto X = RegressorSequence::scalar({0.4, -0.2});
        const auto table = exact_survival_table(m, X, LogisticNormalMixture{0.1, 1.0, 64});
        CHECK(table.monotonicity_violations().empty());
        for (int s = 1; s <= 2; ++s) {
            for (std::size_t k = 1; k < table.row(s).size(); ++k) CHECK(table.row(s)[k] <= table.row(s)[k - 1]);
        }
    }

    TEST_CASE("true tau matches a table entry on an index tie") {
        const ModelSpec m({1.0}, {LinkFunction::binary_threshold(0.0), LinkFunction::binary_threshold(0.5)});
        const auto X = RegressorSequence::scalar({2.0, 0.5});
        const LogisticNormalMixture law{0.3, 1.0, 64};
        CHECK(true_tau(m, {1, {0.0}, 1.0}, law) == exact_survival_table(m, X, law).probability(2, 1.0));
    }

    TEST_CASE("isotonic repair") {
        CHECK(isotonic_nonincreasing({0.9, 0.5, 0.7, 0.1}, {1, 1, 1, 1}) == std::vector<double>{0.9, 0.6, 0.6, 0.1});
        const auto pooled = isotonic_nonincreasing({0.2, 0.8}, {3, 1});
        CHECK(pooled[0] == doctest::Approx(0.35).epsilon(1e-15));
        CHECK(pooled[1] == pooled[0]);
        const SurvivalTable noisy({1.0, 2.0, 3.0}, {{0.8, 0.3, 0.4}, {0.9, 0.6, 0.2}});
        CHECK(noisy.monotonicity_violations().size() == 1);
        const auto fixed = repair_monotonicity(noisy);
        CHECK(fixed.repairs.size() == 1);
        CHECK(fixed.table.row(1)[1] == doctest::Approx(0.35));
        CHECK(fixed.table.row(2) == noisy.row(2));
    }

    TEST_CASE("empirical survival tables") {
        const auto all_top = mc_survival_table({{3.0, 3.0}, {3.0, 3.0}}, {2.0, 3.0});
        CHECK(all_top.table.row(1) == std::vector<double>{1.0, 1.0});
        const auto one = mc_survival_table({{2.0}}, {2.0, 3.0});
        CHECK(one.table.row(1) == std::vector<double>{1.0, 0.0});
        CHECK(one.sample_size == std::vector<std::size_t>{1});
        CHECK_THROWS_AS((void)mc_survival_table({}, {1.0}), std::runtime_error);
    }

    TEST_CASE("empirical tables concentrate around the exact ones") {
        const DiscreteProbitDesign design{1.0, 0.5};
        const auto cells = discrete_design_cells(design);
        const std::size_t n = 100000;
        int inside = 0;
        int total = 0;
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            const Panel panel = simulate_panel(design, n, seed);
            for (std::size_t c = 0; c < cells.size(); ++c) {
                std::vector<std::vector<double>> ys;
                for (std::size_t i = 0; i < panel.outcomes.size(); ++i) {
                    if (panel.group[i] == static_cast<int>(c)) ys.push_back(panel.outcomes[i]);
                }
                const auto est = mc_survival_table(ys, {1.0});
                for (int s = 1; s <= 2; ++s) {
                    const double p = cells[c].survival.probability(s, 1.0);
                    const double band = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(ys.size()));
                    inside += std::abs(est.table.probability(s, 1.0) - p) <= band ? 1 : 0;
                    ++total;
                }
            }
        }
        CHECK(static_cast<double>(inside) / total >= 0.99);
    }
}
