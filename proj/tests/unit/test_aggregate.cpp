#include <cmath>

#include "doctest.h"

#include "cfbounds/aggregate.hpp"
#include "cfbounds/dgp.hpp"

using namespace cfbounds;

namespace {

PopulationMember member_of(const ModelSpec& m, const RegressorSequence& X, const LatentShiftDistribution& law,
                           double weight) {
    return {weight, X, exact_survival_table(m, X, law), law};
}

}  // namespace

TEST_SUITE("aggregate") {
    TEST_CASE("pairwise summation") {
        PairwiseSum s;
        for (int i = 0; i < 1000000; ++i) s.add(0.1);
        CHECK(std::abs(s.total() - 100000.0) < 1e-8);
        CHECK(s.count() == 1000000);
        CHECK(PairwiseSum{}.total() == 0.0);
    }

    TEST_CASE("mean accumulator") {
        MeanAccumulator acc;
        for (double v : {1.0, 2.0, 3.0, 4.0}) acc.add(0.25, v);
        CHECK(acc.mean() == 2.5);
        CHECK(acc.stderr_of_mean() == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
        MeanAccumulator one;
        one.add(1.0, 7.0);
        CHECK(one.stderr_of_mean() == 0.0);
    }

    TEST_CASE("discrete population expectation is the weighted cell sum") {
        const DiscreteProbitDesign design{1.0, 0.5};
        const auto pop = discrete_design_population(design);
        const auto cells = discrete_design_cells(design);
        const CounterfactualQuery q{1, {0.0}, 1.0};
        const auto b = expected_counterfactual_bounds(*pop, q);
        double lo = 0.0;
        double hi = 0.0;
        double tr = 0.0;
        for (const auto& c : cells) {
            const auto i = theorem2_bounds(design.model(), c.regressors(), q, c.survival);
            lo += c.probability * i.lower;
            hi += c.probability * i.upper;
            tr += c.probability * true_tau(design.model(), q, c.law);
        }
        CHECK(b.lower == doctest::Approx(lo).epsilon(1e-14));
        CHECK(b.upper == doctest::Approx(hi).epsilon(1e-14));
        REQUIRE(b.truth.has_value());
        CHECK(*b.truth == doctest::Approx(tr).epsilon(1e-14));
        CHECK(b.mc_draws == 0);
        CHECK(b.stderr_lower == 0.0);
    }

    TEST_CASE("sweep agrees with direct computation and is nested") {
        ProbitContinuousDesign design;
        design.periods = 8;
        const auto pop = probit_design_population(design, 300, 5);
        const std::vector<int> horizons{1, 2, 3, 4, 5, 6, 7, 8};
        const auto sweep = counterfactual_sweep(*pop, {0.0}, 1.0, {3}, horizons, true);
        REQUIRE(sweep.size() == horizons.size());
        double lo = 0.0;
        double hi = 1.0;
        for (const auto& cell : sweep) {
            BoundOptions opts;
            opts.periods = first_periods(cell.horizon, 3, true);
            const auto direct = expected_counterfactual_bounds(*pop, {3, {0.0}, 1.0}, opts);
            CHECK(cell.bound.lower == doctest::Approx(direct.lower).epsilon(1e-13));
            CHECK(cell.bound.upper == doctest::Approx(direct.upper).epsilon(1e-13));
            CHECK(cell.bound.lower >= lo);
            CHECK(cell.bound.upper <= hi);
            CHECK(cell.bound.lower <= *cell.bound.truth);
            CHECK(*cell.bound.truth <= cell.bound.upper);
            CHECK(cell.bound.stderr_upper > 0.0);
            CHECK(cell.bound.mc_draws == 300);
            lo = cell.bound.lower;
            hi = cell.bound.upper;
        }
    }

    TEST_CASE("binary ASF equals the expected counterfactual") {
        const DiscreteProbitDesign design{0.75, 1.0};
        const auto pop = discrete_design_population(design);
        for (double x : {0.0, 1.0}) {
            const auto asf = asf_bounds(*pop, 2, {x});
            const auto ecf = expected_counterfactual_bounds(*pop, {2, {x}, 1.0});
            CHECK(asf.lower == ecf.lower);
            CHECK(asf.upper == ecf.upper);
            CHECK(*asf.truth == *ecf.truth);
        }
    }

    TEST_CASE("tail-sum ASF on relabelled ordered outcomes") {
        const std::vector<std::vector<double>> th{{-0.5, 0.25, 1.0}, {-0.75, 0.0, 0.5}, {-0.25, 0.5, 1.25}};
        std::vector<LinkFunction> links;
        for (const auto& t : th) links.push_back(LinkFunction::tabulated(t, {0.0, 1.0, 2.0, 3.0}));
        const ModelSpec m({1.0}, links);
        std::vector<PopulationMember> members;
        members.push_back(member_of(m, RegressorSequence::scalar({0.0, 1.0, 1.0}), GaussianConvolution{-0.2, 1.0}, 0.5));
        members.push_back(member_of(m, RegressorSequence::scalar({0.0, 0.0, 1.0}), LogisticNormalMixture{0.1, 1.0, 64}, 0.25));
        members.push_back(member_of(m, RegressorSequence::scalar({1.0, 1.0, 1.0}), GaussianConvolution{0.3, 2.0}, 0.25));
        const CellPopulation pop(m, members);

        const auto asf = asf_bounds(pop, 2, {0.5});
        double lo = 0.0;
        double hi = 0.0;
        double tr = 0.0;
        for (double y : {1.0, 2.0, 3.0}) {
            const auto b = expected_counterfactual_bounds(pop, {2, {0.5}, y});
            lo += b.lower;
            hi += b.upper;
            tr += *b.truth;
        }
        CHECK(asf.lower == doctest::Approx(lo).epsilon(1e-14));
        CHECK(asf.upper == doctest::Approx(hi).epsilon(1e-14));
        CHECK(*asf.truth == doctest::Approx(tr).epsilon(1e-14));
        CHECK(asf.lower <= *asf.truth);
        CHECK(*asf.truth <= asf.upper);
    }

    TEST_CASE("censored ASF with point identification everywhere") {
        const ModelSpec m({1.0}, {LinkFunction::censored_at_zero(), LinkFunction::censored_at_zero()});
        const GaussianConvolution law{-0.4, 1.0};
        const CellPopulation pop(m, {member_of(m, RegressorSequence::scalar({0.0, 2.0}), law, 1.0)});
        const auto asf = asf_bounds(pop, 1, {1.0});
        CHECK(asf.upper - asf.lower < 1e-12);
        // E[max(0, x - V)] for V ~ N(mu, s^2): (x - mu) Phi(d) + s phi(d).
        const double d = (1.0 - law.mean) / std::sqrt(law.variance);
        const double exact = (1.0 - law.mean) * normal_cdf(d) + std::sqrt(law.variance) * normal_pdf(d);
        CHECK(std::abs(*asf.truth - exact) < 1e-3);
        CHECK(std::abs(asf.lower - exact) < 1e-3);
    }

    TEST_CASE("ASF rejects supports with negative outcomes") {
        const ModelSpec m({1.0}, {LinkFunction::affine_invertible(0.0)});
        const CellPopulation pop(m, {member_of(m, RegressorSequence::scalar({0.0}), GaussianConvolution{0.0, 1.0}, 1.0)});
        CHECK_THROWS_AS((void)asf_bounds(pop, 1, {0.0}), std::invalid_argument);
        const ModelSpec neg({1.0}, {LinkFunction::tabulated({0.0}, {-1.0, 1.0})});
        const CellPopulation pop2(neg, {member_of(neg, RegressorSequence::scalar({0.0}), GaussianConvolution{0.0, 1.0}, 1.0)});
        CHECK_THROWS_AS((void)asf_bounds(pop2, 1, {0.0}), std::invalid_argument);
    }

    TEST_CASE("ATE bounds on the discrete design") {
        const auto pop = discrete_design_population({1.0, 0.0});
        const auto ate = ate_bounds(*pop, 1, {1.0}, {0.0}, 1.0);
        CHECK(std::abs(ate.lower - 0.09901442014940214) < 1e-10);
        CHECK(std::abs(ate.upper - 0.6595727927588511) < 1e-10);
        CHECK(std::abs(*ate.truth - 0.26024993890652326) < 1e-10);

        const auto half = ate_bounds(*discrete_design_population({0.5, 0.5}), 1, {1.0}, {0.0}, 1.0);
        CHECK(std::abs(half.lower - 0.03667627179424009) < 1e-10);
        CHECK(std::abs(half.upper - 0.42372391414575955) < 1e-10);
        CHECK(std::abs(*half.truth - 0.1381631950841185) < 1e-10);

        const auto zero = ate_bounds(*discrete_design_population({0.0, 0.0}), 1, {1.0}, {0.0}, 1.0);
        CHECK(zero.lower == 0.0);
        CHECK(zero.upper == 0.0);
        CHECK(*zero.truth == 0.0);
    }

    TEST_CASE("degenerate per-X intervals give a point-identified ATE") {
        const ModelSpec m({1.0}, {LinkFunction::affine_invertible(0.0), LinkFunction::affine_invertible(0.5)});
        const CellPopulation pop(m, {member_of(m, RegressorSequence::scalar({0.0, 1.0}), GaussianConvolution{0.1, 1.0}, 0.5),
                                     member_of(m, RegressorSequence::scalar({1.0, 0.0}), GaussianConvolution{-0.1, 2.0}, 0.5)});
        const auto ate = ate_bounds(pop, 1, {1.0}, {0.0}, 0.25);
        CHECK(ate.lower == ate.upper);
        CHECK(ate.lower == doctest::Approx(*ate.truth).epsilon(1e-12));
    }

    TEST_CASE("crossed intervals are clipped and capped") {
        const ModelSpec m({1.0}, {LinkFunction::binary_threshold(0.0), LinkFunction::binary_threshold(0.0)});
        const auto X = RegressorSequence::scalar({-1.0, 1.0});
        const SurvivalTable crossed({1.0}, {{0.6}, {0.5}});
        const SurvivalTable fine({1.0}, {{0.3}, {0.5}});
        const CounterfactualQuery q{1, {0.0}, 1.0};

        const CellPopulation small(m, {{0.005, X, crossed, std::nullopt}, {0.995, X, fine, std::nullopt}});
        const auto b = expected_counterfactual_bounds(small, q);
        CHECK(b.crossed == 1);
        CHECK(b.lower == doctest::Approx(0.005 * 0.55 + 0.995 * 0.3));
        CHECK(b.upper == doctest::Approx(0.005 * 0.55 + 0.995 * 0.5));
        CHECK_FALSE(b.truth.has_value());

        const CellPopulation big(m, {{0.02, X, crossed, std::nullopt}, {0.98, X, fine, std::nullopt}});
        CHECK_THROWS_AS((void)expected_counterfactual_bounds(big, q), std::runtime_error);
        CHECK_THROWS_AS(CellPopulation(m, {{0.5, X, fine, std::nullopt}}), std::invalid_argument);
    }
}
