#include "cfbounds/dgp.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cfbounds/quadrature.hpp"

namespace cfbounds {

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream ids that are not unit indices.
constexpr std::uint64_t kThresholdStream = 0xffffffff00000001ULL;

// Substreams within a unit.
constexpr std::uint64_t kRegressorSub = 0;
constexpr std::uint64_t kLatentSub = 1;

double standard_logistic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = 0.0;
    do {
        u = unif(rng);
    } while (u <= 0.0);
    return std::log(u / (1.0 - u));
}

double outcome_of(const ModelSpec& model, int t, double latent) { return model.link(t).evaluate(latent); }

class ProbitPopulation final : public Population {
public:
    ProbitPopulation(ProbitContinuousDesign design, std::size_t draws, std::uint64_t seed)
        : design_(design), model_(design.model()), draws_(draws), seed_(seed) {}

    [[nodiscard]] const ModelSpec& model() const override { return model_; }
    [[nodiscard]] std::size_t size() const override { return draws_; }
    [[nodiscard]] bool monte_carlo() const override { return true; }

    [[nodiscard]] PopulationMember member(std::size_t i) const override {
        if (i >= draws_) throw std::out_of_range("probit population: member index out of range");
        RegressorSequence X = design_.draw_regressors(seed_, i);
        LatentShiftDistribution law = design_.latent_law(X);
        SurvivalTable table = exact_survival_table(model_, X, law);
        return {1.0 / static_cast<double>(draws_), std::move(X), std::move(table), std::move(law)};
    }

private:
    ProbitContinuousDesign design_;
    ModelSpec model_;
    std::size_t draws_;
    std::uint64_t seed_;
};

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ substream);
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
    return std::mt19937_64(mix_seed(seed, stream, substream));
}

// ---------------------------------------------------------------------------

void ProbitContinuousDesign::validate() const {
    if (periods < 1) throw std::invalid_argument("probit design: periods must be >= 1");
    if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2)) {
        throw std::invalid_argument("probit design: sigma_x2 must be positive");
    }
    if (!std::isfinite(rho)) throw std::invalid_argument("probit design: rho must be finite");
}

double ProbitContinuousDesign::threshold(int t) const {
    if (t < 1 || t > periods) throw std::out_of_range("probit design: period out of range");
    if (!time_effects) return 0.0;
    const double a = -1.0 + 2.0 * (t + 1) / periods;
    return a * a;
}

ModelSpec ProbitContinuousDesign::model() const {
    validate();
    std::vector<LinkFunction> links;
    for (int t = 1; t <= periods; ++t) links.push_back(LinkFunction::binary_threshold(threshold(t)));
    return {{1.0}, std::move(links)};
}

RegressorSequence ProbitContinuousDesign::draw_regressors(std::uint64_t seed, std::uint64_t unit) const {
    auto rng = stream_engine(seed, unit, kRegressorSub);
    std::normal_distribution<double> z(0.0, 1.0);
    const double sd = std::sqrt(sigma_x2);
    std::vector<double> x(static_cast<std::size_t>(periods));
    x[0] = sd * z(rng);
    for (std::size_t t = 1; t < x.size(); ++t) x[t] = rho * x[t - 1] + sd * z(rng);
    return RegressorSequence::scalar(x);
}

LatentShiftDistribution ProbitContinuousDesign::latent_law(const RegressorSequence& X) const {
    return GaussianConvolution{-X.at(1).at(0), 2.0};
}

std::unique_ptr<Population> probit_design_population(const ProbitContinuousDesign& design, std::size_t draws,
                                                     std::uint64_t seed) {
    design.validate();
    if (draws == 0) throw std::invalid_argument("probit population: need at least one draw");
    return std::make_unique<ProbitPopulation>(design, draws, seed);
}

// ---------------------------------------------------------------------------

ThresholdDraw draw_staggered_thresholds(int periods, std::uint64_t seed) {
    if (periods < 1) throw std::invalid_argument("threshold draw: periods must be >= 1");
    auto rng = stream_engine(seed, kThresholdStream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> centered(-1.0, 1.0);
    ThresholdDraw d;
    // 1 - U[0,1) keeps the fan-out strictly positive.
    d.eta_plus = 1.0 - unit(rng);
    d.eta_minus = 1.0 - unit(rng);
    d.center.assign(static_cast<std::size_t>(periods), 0.0);
    for (int t = 2; t <= periods; ++t) d.center[static_cast<std::size_t>(t - 1)] = centered(rng);
    return d;
}

void StaggeredDesign::validate() const {
    if (groups < 1) throw std::invalid_argument("staggered design: groups must be >= 1");
    if (categories < 2 || categories % 2 != 0) {
        throw std::invalid_argument("staggered design: J must be even and >= 2, got " + std::to_string(categories));
    }
    if (draw.center.empty()) throw std::invalid_argument("staggered design: empty threshold draw");
    if (draw.center.front() != 0.0) throw std::invalid_argument("staggered design: middle threshold in period 1 must be 0");
    if (categories > 2 && (!(draw.eta_plus > 0.0) || !(draw.eta_minus > 0.0))) {
        throw std::invalid_argument("staggered design: eta_plus and eta_minus must be positive");
    }
}

std::vector<double> StaggeredDesign::thresholds(int t) const {
    if (t < 1 || t > periods()) throw std::out_of_range("staggered design: period out of range");
    const int jbar = top_half_start();
    const double mid = draw.center[static_cast<std::size_t>(t - 1)];
    const double spread = jbar - 1;
    std::vector<double> out;
    for (int j = 2; j <= categories; ++j) {
        if (j < jbar) {
            out.push_back(mid - (jbar - j) / spread * draw.eta_minus);
        } else {
            out.push_back(mid + (j - jbar) / spread * draw.eta_plus);
        }
    }
    return out;
}

ModelSpec StaggeredDesign::model() const {
    validate();
    std::vector<LinkFunction> links;
    for (int t = 1; t <= periods(); ++t) links.push_back(LinkFunction::ordered_thresholds(thresholds(t)));
    return {{1.0}, std::move(links)};
}

RegressorSequence StaggeredDesign::regressors(int group) const {
    if (group < 1 || group > groups) throw std::out_of_range("staggered design: group out of range");
    std::vector<double> x(static_cast<std::size_t>(periods()));
    for (int t = 1; t <= periods(); ++t) x[static_cast<std::size_t>(t - 1)] = t <= group ? 0.0 : 1.0;
    return RegressorSequence::scalar(x);
}

LatentShiftDistribution StaggeredDesign::latent_law(int group) const {
    if (group < 1 || group > groups) throw std::out_of_range("staggered design: group out of range");
    return LogisticNormalMixture{static_cast<double>(group) / groups - 0.5, 1.0, 64};
}

std::unique_ptr<Population> staggered_design_population(const StaggeredDesign& design) {
    ModelSpec model = design.model();
    std::vector<PopulationMember> members;
    for (int g = 1; g <= design.groups; ++g) {
        RegressorSequence X = design.regressors(g);
        LatentShiftDistribution law = design.latent_law(g);
        SurvivalTable table = exact_survival_table(model, X, law);
        members.push_back({1.0 / design.groups, std::move(X), std::move(table), std::move(law)});
    }
    return std::make_unique<CellPopulation>(std::move(model), std::move(members));
}

// ---------------------------------------------------------------------------

void DiscreteProbitDesign::validate() const {
    if (!std::isfinite(beta) || !std::isfinite(lambda2)) {
        throw std::invalid_argument("discrete design: beta and lambda2 must be finite");
    }
}

ModelSpec DiscreteProbitDesign::model() const {
    validate();
    return {{beta}, {LinkFunction::binary_threshold(0.0), LinkFunction::binary_threshold(lambda2)}};
}

RegressorSequence DiscreteCell::regressors() const {
    return RegressorSequence::scalar({static_cast<double>(x[0]), static_cast<double>(x[1])});
}

std::vector<DiscreteCell> discrete_design_cells(const DiscreteProbitDesign& design) {
    const ModelSpec model = design.model();
    const QuadratureRule rule = gauss_legendre(256, -8.0, 8.0);
    std::vector<DiscreteCell> cells;
    for (int x1 = 0; x1 <= 1; ++x1) {
        for (int x2 = 0; x2 <= 1; ++x2) {
            std::vector<double> mass(rule.nodes.size());
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const double a = rule.nodes[k];
                const double p = normal_cdf(a);
                const double q = normal_cdf(-a);
                mass[k] = rule.weights[k] * normal_pdf(a) * (x1 ? p : q) * (x2 ? p : q);
            }
            const double probability = std::accumulate(mass.begin(), mass.end(), 0.0);
            if (!(probability > 0.0)) throw std::runtime_error("discrete design: empty regressor cell");
            for (double& m : mass) m /= probability;
            // U - alpha <= c  <=>  U <= c + alpha, so the atoms enter with a plus sign.
            ProbitFixedEffectMixture law{rule.nodes, std::move(mass)};
            const RegressorSequence X = RegressorSequence::scalar({static_cast<double>(x1), static_cast<double>(x2)});
            SurvivalTable survival = exact_survival_table(model, X, law);
            DiscreteCell cell{{x1, x2}, probability, std::move(law), std::move(survival)};
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::unique_ptr<Population> discrete_design_population(const DiscreteProbitDesign& design) {
    std::vector<PopulationMember> members;
    double total = 0.0;
    auto cells = discrete_design_cells(design);
    for (const auto& c : cells) total += c.probability;
    for (auto& c : cells) {
        members.push_back({c.probability / total, c.regressors(), std::move(c.survival), std::move(c.law)});
    }
    return std::make_unique<CellPopulation>(design.model(), std::move(members));
}

// ---------------------------------------------------------------------------

Panel simulate_panel(const ProbitContinuousDesign& design, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("simulate_panel: n must be >= 1");
    const ModelSpec model = design.model();
    Panel panel;
    for (std::size_t i = 0; i < n; ++i) {
        RegressorSequence X = design.draw_regressors(seed, i);
        auto rng = stream_engine(seed, i, kLatentSub);
        std::normal_distribution<double> z(0.0, 1.0);
        const double alpha = X.at(1)[0] + z(rng);
        std::vector<double> y;
        for (int t = 1; t <= design.periods; ++t) {
            y.push_back(outcome_of(model, t, alpha + model.index(X.at(t)) - z(rng)));
        }
        panel.regressors.push_back(std::move(X));
        panel.outcomes.push_back(std::move(y));
        panel.group.push_back(0);
    }
    return panel;
}

Panel simulate_panel(const StaggeredDesign& design, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("simulate_panel: n must be >= 1");
    const ModelSpec model = design.model();
    Panel panel;
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = stream_engine(seed, i, kRegressorSub);
        std::uniform_int_distribution<int> pick(1, design.groups);
        const int g = pick(rng);
        RegressorSequence X = design.regressors(g);
        auto lrng = stream_engine(seed, i, kLatentSub);
        std::normal_distribution<double> z(0.0, 1.0);
        const double alpha = static_cast<double>(g) / design.groups - 0.5 + z(lrng);
        std::vector<double> y;
        for (int t = 1; t <= design.periods(); ++t) {
            y.push_back(outcome_of(model, t, alpha + model.index(X.at(t)) - standard_logistic(lrng)));
        }
        panel.regressors.push_back(std::move(X));
        panel.outcomes.push_back(std::move(y));
        panel.group.push_back(g);
    }
    return panel;
}

Panel simulate_panel(const DiscreteProbitDesign& design, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("simulate_panel: n must be >= 1");
    const ModelSpec model = design.model();
    Panel panel;
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = stream_engine(seed, i, kLatentSub);
        std::normal_distribution<double> z(0.0, 1.0);
        const double alpha = z(rng);
        const int x1 = alpha >= z(rng) ? 1 : 0;
        const int x2 = alpha >= z(rng) ? 1 : 0;
        RegressorSequence X = RegressorSequence::scalar({static_cast<double>(x1), static_cast<double>(x2)});
        std::vector<double> y;
        for (int t = 1; t <= 2; ++t) y.push_back(outcome_of(model, t, alpha + model.index(X.at(t)) - z(rng)));
        panel.regressors.push_back(std::move(X));
        panel.outcomes.push_back(std::move(y));
        panel.group.push_back(2 * x1 + x2);
    }
    return panel;
}

// ---------------------------------------------------------------------------

CellPopulation::CellPopulation(ModelSpec model, std::vector<PopulationMember> members)
    : model_(std::move(model)), members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("CellPopulation: no members");
    double total = 0.0;
    for (const auto& m : members_) {
        if (!(m.weight >= 0.0)) throw std::invalid_argument("CellPopulation: negative weight");
        if (m.regressors.periods() != model_.periods()) {
            throw std::invalid_argument("CellPopulation: member regressors disagree with the model on T");
        }
        total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "CellPopulation: weights sum to " << total << ", expected 1";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace cfbounds
