#include <random>

#include "doctest.h"

#include "cfbounds/bounds.hpp"
#include "cfbounds/probability.hpp"

using namespace cfbounds;

namespace {

ModelSpec binary_model(const std::vector<double>& thresholds, double beta = 1.0) {
    std::vector<LinkFunction> links;
    for (double l : thresholds) links.push_back(LinkFunction::binary_threshold(l));
    return ModelSpec({beta}, links);
}

ModelSpec ordered_model(const std::vector<std::vector<double>>& thresholds, double beta = 1.0) {
    std::vector<LinkFunction> links;
    for (const auto& l : thresholds) links.push_back(LinkFunction::ordered_thresholds(l));
    return ModelSpec({beta}, links);
}

SurvivalTable binary_table(const std::vector<double>& p) {
    std::vector<std::vector<double>> rows;
    for (double v : p) rows.push_back({v});
    return {{1.0}, rows};
}

}  // namespace

TEST_SUITE("bounds") {
    TEST_CASE("counterfactual and observed indices") {
        const CounterfactualQuery q{1, {0.0}, 1.0};
        CHECK(counterfactual_index(binary_model({0.0, 0.0}), q) == ExtendedReal(0.0));

        const ModelSpec affine({1.0}, {LinkFunction::affine_invertible(1.0)});
        CHECK(counterfactual_index(affine, {1, {2.0}, 3.0}) == ExtendedReal(0.0));

        const ModelSpec ordered = ordered_model({{0.0, 0.5}});
        CHECK(counterfactual_index(ordered, {1, {1.0}, 3.0}) == ExtendedReal(0.5));

        CHECK(observed_index(binary_model({0.0, 0.5}), RegressorSequence::scalar({0.0, 1.0}), 2, 1.0) ==
              ExtendedReal(0.5));
        const ModelSpec censored({1.0}, {LinkFunction::censored_at_zero()});
        CHECK(observed_index(censored, RegressorSequence::scalar({1.0}), 1, 2.0) == ExtendedReal(-1.0));
        const ModelSpec stag = ordered_model({{-0.5, 0.0, 0.5}, {-0.2, 0.3, 0.9}});
        CHECK(observed_index(stag, RegressorSequence::scalar({0.0, 0.0}), 2, 3.0) == ExtendedReal(-0.3));
    }

    TEST_CASE("classification") {
        CHECK(classify(0.5, 0.5, 0.0) == IndexComparison::Both);
        CHECK(classify(1.0, 0.0, 0.0) == IndexComparison::Upper);
        CHECK(classify(ExtendedReal::neg_inf(), 0.0, 0.0) == IndexComparison::Lower);
        CHECK(classify(0.1 + 1e-10, 0.1, 1e-9) == IndexComparison::Both);
        CHECK(classify(0.1 + 1e-8, 0.1, 1e-9) == IndexComparison::Upper);
        CHECK(classify(ExtendedReal::neg_inf(), ExtendedReal::neg_inf(), 0.0) == IndexComparison::Both);
        CHECK(classify(ExtendedReal::pos_inf(), 3.0, 0.0) == IndexComparison::Upper);
        CHECK(to_string(IndexComparison::Lower) == "lower");
    }

    TEST_CASE("model validation") {
        CHECK_THROWS_AS(ModelSpec({1.0}, {}), std::invalid_argument);
        CHECK_THROWS_AS(ModelSpec({1.0}, {LinkFunction::binary_threshold(0.0), LinkFunction::censored_at_zero()}),
                        std::invalid_argument);
        CHECK_THROWS_AS((void)binary_model({0.0}).index({1.0, 2.0}), std::invalid_argument);
        CHECK_THROWS_AS(SurvivalTable({1.0}, {{1.5}}), std::invalid_argument);
    }

    TEST_CASE("binary model, same-period bounds") {
        const ModelSpec m = binary_model({0.0});
        const CounterfactualQuery q{1, {0.0}, 1.0};

        SUBCASE("equal index point-identifies") {
            const auto b = theorem1_bounds(m, RegressorSequence::scalar({0.0}), q, binary_table({0.4}));
            CHECK(b.point_identified);
            CHECK(b.lower == 0.4);
            CHECK(b.upper == 0.4);
            CHECK(b.lower_witness == Witness{1, 1.0});
        }
        SUBCASE("higher observed index gives an upper bound") {
            const auto b = theorem1_bounds(m, RegressorSequence::scalar({1.0}), q, binary_table({0.8}));
            CHECK_FALSE(b.point_identified);
            CHECK(b.lower == 0.0);
            CHECK(b.upper == 0.8);
            CHECK_FALSE(b.lower_witness.has_value());
        }
        SUBCASE("lower observed index gives a lower bound and an empty upper set") {
            const auto b = theorem1_bounds(m, RegressorSequence::scalar({-1.0}), q, binary_table({0.2}));
            CHECK(b.lower == 0.2);
            CHECK(b.upper == 1.0);
            CHECK_FALSE(b.upper_witness.has_value());
        }
    }

    TEST_CASE("binary model, cross-period bounds") {
        SUBCASE("a matching period point-identifies") {
            const ModelSpec m = binary_model({0.0, 0.5});
            const auto b = theorem2_bounds(m, RegressorSequence::scalar({1.0, 0.5}), {1, {0.0}, 1.0},
                                           binary_table({0.7, 0.45}));
            CHECK(b.point_identified);
            CHECK(b.lower == 0.45);
            CHECK(b.upper == 0.45);
            CHECK(b.lower_witness == Witness{2, 1.0});
        }
        SUBCASE("stayers are informed by other periods' thresholds") {
            const ModelSpec m = binary_model({0.0, 1.5});
            const auto X = RegressorSequence::scalar({1.0, 1.0});
            const CounterfactualQuery q{1, {0.0}, 1.0};
            const auto t1 = theorem1_bounds(m, X, q, binary_table({0.7, 0.3}));
            const auto t2 = theorem2_bounds(m, X, q, binary_table({0.7, 0.3}));
            CHECK(t1.lower == 0.0);
            CHECK(t2.lower == 0.3);
            CHECK(t2.upper == 0.7);
        }
        SUBCASE("all observed indices above the counterfactual") {
            const ModelSpec m = binary_model({0.0, 0.0, 0.0});
            const auto b = theorem2_bounds(m, RegressorSequence::scalar({1.0, 2.0, 0.5}), {1, {0.0}, 1.0},
                                           binary_table({0.6, 0.8, 0.55}));
            CHECK(b.lower == 0.0);
            CHECK(b.upper == 0.55);
            CHECK(b.upper_witness == Witness{3, 1.0});
        }
    }

    TEST_CASE("censored model point identification") {
        const ModelSpec m({1.0}, {LinkFunction::censored_at_zero(), LinkFunction::censored_at_zero()});
        const auto X = RegressorSequence::scalar({0.3, 1.2});
        const GaussianConvolution law{0.1, 1.5};
        const SurvivalTable table = exact_survival_table(m, X, law);
        const CounterfactualQuery q{2, {0.5}, 1.0};
        const auto b = theorem2_bounds(m, X, q, table);
        CHECK(b.point_identified);
        CHECK(b.lower == doctest::Approx(true_tau(m, q, law)).epsilon(1e-12));
        CHECK(b.upper == b.lower);
        // y + (X_1 - x) b = 0.8 > 0, the period-1 attaining outcome.
        const auto p1 = per_period_bounds(m, X, q, table);
        CHECK(p1[0].point_identified);
        CHECK(p1[0].lower_witness->outcome == doctest::Approx(0.8).epsilon(1e-15));
    }

    TEST_CASE("censored model without an attaining outcome uses the limit point") {
        const ModelSpec m({1.0}, {LinkFunction::censored_at_zero()});
        const auto X = RegressorSequence::scalar({-2.0});
        const GaussianConvolution law{0.0, 1.0};
        const SurvivalTable table = exact_survival_table(m, X, law);
        BoundOptions opts;
        opts.continuous_grid = {0.5, 1.0, 2.0};
        // y + (X - x) b = 1 - 2 < 0: every observed index is below.
        const CounterfactualQuery q{1, {0.0}, 1.0};
        const auto b = theorem1_bounds(m, X, q, table, opts);
        CHECK_FALSE(b.point_identified);
        CHECK(b.lower == doctest::Approx(normal_cdf(-2.0 - 1e-6)).epsilon(1e-12));
        CHECK(b.upper == 1.0);
        CHECK(b.contains(true_tau(m, q, law)));
    }

    TEST_CASE("invertible model has zero width") {
        const ModelSpec m({0.5, -1.0}, {LinkFunction::affine_invertible(0.3), LinkFunction::affine_invertible(-1.1)});
        const RegressorSequence X({{1.0, 2.0}, {0.0, -1.0}});
        const LogisticNormalMixture law{0.2, 0.7, 64};
        const SurvivalTable table = exact_survival_table(m, X, law);
        for (double y : {-2.0, 0.0, 1.7}) {
            const CounterfactualQuery q{2, {0.4, 0.1}, y};
            const auto b = theorem1_bounds(m, X, q, table);
            CHECK(b.point_identified);
            CHECK(b.width() == 0.0);
            CHECK(b.lower == doctest::Approx(true_tau(m, q, law)).epsilon(1e-12));
        }
    }

    TEST_CASE("per-period bounds intersect to the cross-period bounds") {
        const ModelSpec m = ordered_model({{-1.0, 0.0, 1.0}, {-0.5, 0.25, 2.0}, {-2.0, 0.5, 0.75}});
        const auto X = RegressorSequence::scalar({0.0, 1.0, 0.5});
        const GaussianConvolution law{-0.3, 1.2};
        const SurvivalTable table = exact_survival_table(m, X, law);
        for (double y : {2.0, 3.0, 4.0}) {
            const CounterfactualQuery q{1, {0.75}, y};
            const auto parts = per_period_bounds(m, X, q, table);
            REQUIRE(parts.size() == 3);
            const auto whole = theorem2_bounds(m, X, q, table);
            const auto joined = intersect(parts);
            CHECK(joined.lower == whole.lower);
            CHECK(joined.upper == whole.upper);
            CHECK(joined.lower_witness == whole.lower_witness);
            CHECK(joined.upper_witness == whole.upper_witness);
        }
        const ModelSpec single = ordered_model({{0.0, 1.0}});
        const auto X1 = RegressorSequence::scalar({0.5});
        const SurvivalTable t1 = exact_survival_table(single, X1, law);
        const CounterfactualQuery q{1, {0.0}, 2.0};
        CHECK(per_period_bounds(single, X1, q, t1).front().lower == theorem1_bounds(single, X1, q, t1).lower);
        CHECK(per_period_bounds(single, X1, q, t1).front().upper == theorem1_bounds(single, X1, q, t1).upper);
    }

    TEST_CASE("noisy tables may cross and keep both endpoints") {
        const ModelSpec m = binary_model({0.0, 0.0});
        const auto b = theorem2_bounds(m, RegressorSequence::scalar({-1.0, 1.0}), {1, {0.0}, 1.0},
                                       binary_table({0.6, 0.5}));
        CHECK(b.crossed);
        CHECK(b.lower == 0.6);
        CHECK(b.upper == 0.5);
    }

    TEST_CASE("worst case over candidates") {
        const auto X = RegressorSequence::scalar({1.0, 0.0});
        const SurvivalTable table = binary_table({0.7, 0.4});
        const CounterfactualQuery q{1, {0.5}, 1.0};
        const ModelSpec a = binary_model({0.0, 0.0}, 1.0);
        const auto single = worst_case_bounds({a}, X, q, {table});
        const auto direct = theorem2_bounds(a, X, q, table);
        CHECK(single.lower == direct.lower);
        CHECK(single.upper == direct.upper);

        const ModelSpec b = binary_model({0.0, 0.0}, 0.0);
        const auto env = worst_case_bounds({a, b}, X, q, {table});
        const auto ib = theorem2_bounds(b, X, q, table);
        CHECK(env.lower == std::min(direct.lower, ib.lower));
        CHECK(env.upper == std::max(direct.upper, ib.upper));
        CHECK_THROWS_AS((void)worst_case_bounds({}, X, q, {table}), std::invalid_argument);
    }

    TEST_CASE("moment residuals") {
        const ModelSpec m = binary_model({0.0, 0.25, -0.5});
        const auto X = RegressorSequence::scalar({1.0, 0.5, -1.0});
        const GaussianConvolution law{0.0, 2.0};
        const SurvivalTable table = exact_survival_table(m, X, law);
        const CounterfactualQuery q{1, {0.0}, 1.0};
        const double tau = true_tau(m, q, law);
        for (const auto& r : moment_inequality_residuals(m, X, q, table, tau)) CHECK(r.residual >= 0.0);
        const auto b = theorem2_bounds(m, X, q, table);
        bool negative = false;
        for (const auto& r : moment_inequality_residuals(m, X, q, table, std::min(1.0, b.upper + 0.01))) {
            negative = negative || r.residual < 0.0;
        }
        CHECK(negative);

        // Period 2 has observed index 0.5 - 0.5 = 0, equal to the counterfactual one.
        const ModelSpec tied = binary_model({0.0, 0.5, -0.5});
        const SurvivalTable tied_table = exact_survival_table(tied, X, law);
        for (double t : {0.0, 0.3, 1.0}) {
            const auto rs = moment_inequality_residuals(tied, X, q, tied_table, t);
            CHECK(rs[1].residual == 0.0);
        }
    }

    TEST_CASE("set cover, nesting and tightening on random Gaussian designs") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> unit(-1.5, 1.5);
        std::uniform_int_distribution<int> periods(1, 6);
        std::uniform_int_distribution<int> cats(1, 4);
        for (int rep = 0; rep < 150; ++rep) {
            const int T = periods(rng);
            const int K = cats(rng);
            std::vector<LinkFunction> links;
            for (int t = 0; t < T; ++t) {
                std::vector<double> th;
                double v = unit(rng) - 1.0;
                for (int k = 0; k < K; ++k) {
                    th.push_back(v);
                    v += 0.1 + std::abs(unit(rng));
                }
                links.push_back(LinkFunction::ordered_thresholds(th));
            }
            const ModelSpec m({unit(rng)}, links);
            std::vector<double> xs;
            for (int t = 0; t < T; ++t) xs.push_back(unit(rng));
            const auto X = RegressorSequence::scalar(xs);
            const GaussianConvolution law{unit(rng), 1.0 + std::abs(unit(rng))};
            const SurvivalTable table = exact_survival_table(m, X, law);
            std::uniform_int_distribution<int> pick_t(1, T);
            std::uniform_int_distribution<int> pick_y(2, K + 1);
            const CounterfactualQuery q{pick_t(rng), {unit(rng)}, static_cast<double>(pick_y(rng))};
            const double tau = true_tau(m, q, law);

            const auto pairs = classify_pairs(m, X, q, table, {q.t}, {});
            CHECK(pairs.size() == static_cast<std::size_t>(K));

            const auto t1 = theorem1_bounds(m, X, q, table);
            const auto t2 = theorem2_bounds(m, X, q, table);
            CHECK(t1.contains(tau, 1e-15));
            CHECK(t2.contains(tau, 1e-15));
            CHECK(t1.lower <= t2.lower);
            CHECK(t2.upper <= t1.upper);

            double lo = 0.0;
            double hi = 1.0;
            for (int h = 1; h <= T; ++h) {
                BoundOptions opts;
                opts.periods = first_periods(h, q.t, false);
                const auto b = theorem2_bounds(m, X, q, table, opts);
                CHECK(b.lower >= lo);
                CHECK(b.upper <= hi);
                lo = b.lower;
                hi = b.upper;
            }
        }
    }

    TEST_CASE("refining an ordered model never widens the interval") {
        const GaussianConvolution law{0.1, 1.3};
        const auto X = RegressorSequence::scalar({0.0, 1.0, -0.5});
        const ModelSpec coarse = ordered_model({{0.0}, {0.4}, {-0.3}});
        const ModelSpec fine = ordered_model({{-0.8, 0.0, 0.9}, {-0.2, 0.4, 1.1}, {-1.0, -0.3, 0.2}});
        const auto coarse_b = theorem2_bounds(coarse, X, {1, {0.5}, 2.0}, exact_survival_table(coarse, X, law));
        // Outcome 2 in the coarse model is outcome 3 in the fine one.
        const auto fine_b = theorem2_bounds(fine, X, {1, {0.5}, 3.0}, exact_survival_table(fine, X, law));
        CHECK(fine_b.lower >= coarse_b.lower - 1e-15);
        CHECK(fine_b.upper <= coarse_b.upper + 1e-15);
    }

    TEST_CASE("first periods") {
        CHECK(first_periods(3, 5, true) == std::vector<int>{1, 2, 3, 5});
        CHECK(first_periods(3, 2, true) == std::vector<int>{1, 2, 3});
        CHECK(first_periods(2, 5, false) == std::vector<int>{1, 2});
    }
}
