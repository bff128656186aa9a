#include "cocyclelab/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cocyclelab/errors.hpp"

namespace cocyclelab::approximation {

DiscretizationResult discretize_sampling(const LayeredSamplingFunction& f, int radius) {
    if (radius < 0) throw ConfigError("discretization radius must be >= 0");
    std::vector<SamplingLayer> kept;
    double bound = f.tail();
    for (const auto& layer : f.layers()) {
        if (layer.radius <= radius) {
            kept.push_back(layer);
        } else {
            double sup = 0.0;
            for (const auto& [window, value] : layer.table) sup = std::max(sup, std::abs(value));
            bound += std::abs(layer.coefficient) * sup;
        }
    }
    return {LayeredSamplingFunction(std::move(kept), 0.0), bound};
}

Mat2 BlendedFamily::eval_raw(double energy, const Word& window) const {
    const double e = std::clamp(energy, j_min, j_max);
    const auto it = std::lower_bound(windows.begin(), windows.end(), window);
    if (it == windows.end() || *it != window) throw IllegalWindowError(window);
    const std::size_t w = static_cast<std::size_t>(it - windows.begin());

    if (nodes.size() == 1) return tables[0][w];
    const double h = (j_max - j_min) / static_cast<double>(nodes.size() - 1);
    std::size_t cell = static_cast<std::size_t>((e - j_min) / h);
    cell = std::min(cell, nodes.size() - 2);
    const double t = (e - nodes[cell]) / h;
    return (1.0 - t) * tables[cell][w] + t * tables[cell + 1][w];
}

Mat2 BlendedFamily::eval(double energy, const Word& window) const {
    const Mat2 blend = eval_raw(energy, window);
    const double det = blend.det();
    if (!(det > 0.0))
        throw ConfigError("blended matrix has non-positive determinant " + std::to_string(det));
    return (1.0 / std::sqrt(det)) * blend;
}

CocycleFamily BlendedFamily::as_family() const {
    BlendedFamily copy = *this;
    return CocycleFamily(
        spec, radius, j_min, j_max,
        [copy](double energy, const Word& window) { return copy.eval(energy, window); },
        "blended");
}

ApproximationResult approximate_family(const CocycleFamily& family, double j_min, double j_max,
                                       double epsilon, int initial_cover, int max_cover,
                                       int verify_per_cell, const Budget& budget) {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (!(j_min < j_max)) throw ConfigError("approximation interval is empty");
    if (initial_cover < 2) throw ConfigError("cover needs at least 2 nodes");

    const FactorLanguage lang = factor_set(family.spec(), 2L * family.radius() + 1, budget);

    std::string last_failure;
    for (int cover = initial_cover; cover <= max_cover; cover = 2 * cover - 1) {
        BlendedFamily blended{family.spec(), family.radius(), j_min, j_max, {}, lang.words, {}};
        blended.nodes.resize(cover);
        const double h = (j_max - j_min) / static_cast<double>(cover - 1);
        for (int k = 0; k < cover; ++k)
            blended.nodes[k] = j_min + static_cast<double>(k) * h;
        blended.tables.resize(cover);
        for (int k = 0; k < cover; ++k)
            blended.tables[k] = family.materialize(blended.nodes[k], blended.windows);

        // sampled verification: per cell, interior points against the input
        double sup_error = 0.0;
        double min_det = std::numeric_limits<double>::infinity();
        double max_det = -min_det;
        bool det_ok = true;
        for (int k = 0; k < cover - 1 && det_ok; ++k) {
            for (int s = 0; s <= verify_per_cell && det_ok; ++s) {
                const double e =
                    blended.nodes[k] + h * static_cast<double>(s) / (verify_per_cell + 1.0);
                for (const Word& w : blended.windows) {
                    const Mat2 raw = blended.eval_raw(e, w);
                    const double det = raw.det();
                    min_det = std::min(min_det, det);
                    max_det = std::max(max_det, det);
                    if (!(det > 0.0)) {
                        det_ok = false;
                        break;
                    }
                    const Mat2 renorm = (1.0 / std::sqrt(det)) * raw;
                    sup_error =
                        std::max(sup_error, (renorm - family.eval(e, w)).spectral_norm());
                }
            }
        }

        if (!det_ok) {
            last_failure = "blended determinant non-positive at cover " + std::to_string(cover);
            continue;
        }
        if (sup_error <= epsilon)
            return ApproximationResult{std::move(blended), epsilon, sup_error, cover, min_det,
                                       max_det};
        last_failure = "sup error " + std::to_string(sup_error) + " at cover " +
                       std::to_string(cover);
    }
    throw ConfigError("cover refinement failed below error " + std::to_string(epsilon) + ": " +
                      last_failure);
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// random locally constant function with sup <= 1 at the given radius
LayeredSamplingFunction random_direction(const SubshiftSpec& spec, int radius,
                                         std::uint64_t seed, const Budget& budget) {
    const FactorLanguage lang = factor_set(spec, 2L * radius + 1, budget);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    SamplingLayer layer;
    layer.radius = radius;
    layer.coefficient = 1.0;
    for (const Word& w : lang.words) layer.table[w] = unit(rng);
    return LayeredSamplingFunction({std::move(layer)});
}

bool proxy_passes(const LayeredSamplingFunction& f, const SubshiftSpec& spec,
                  const ConstructionParams& params, double epsilon, const Budget& budget) {
    std::vector<double> grid(params.grid_count);
    for (int i = 0; i < params.grid_count; ++i)
        grid[i] = params.grid_min + (params.grid_max - params.grid_min) *
                                        static_cast<double>(i) / (params.grid_count - 1);
    const CocycleFamily family =
        CocycleFamily::schrodinger(f, spec, params.grid_min, params.grid_max);
    const std::vector<uniformity::EnergyClassification> classes = uniformity::w_epsilon_test(
        family, grid, epsilon, params.horizon, params.w_params, budget, params.threads);
    for (const auto& c : classes)
        if (c.cls == uniformity::EnergyClass::Fail) return false;
    return true;
}

}  // namespace

ConstructionResult construct_uniform_potential(const LayeredSamplingFunction& g0,
                                               const std::vector<LayeredSamplingFunction>& generators,
                                               const SubshiftSpec& spec,
                                               const ConstructionParams& params,
                                               const Budget& budget) {
    if (params.epsilons.empty()) throw ConfigError("construction needs at least one stage");
    for (std::size_t i = 1; i < params.epsilons.size(); ++i)
        if (!(params.epsilons[i] < params.epsilons[i - 1]))
            throw ConfigError("stage epsilons must decrease strictly");
    if (generators.size() < params.epsilons.size())
        throw ConfigError("need one generator per stage");
    if (g0.tail() != 0.0) throw ConfigError("g0 must be finite-layered");
    for (const auto& g : generators) {
        if (g.tail() != 0.0) throw ConfigError("generators must be finite-layered");
        if (g.sup_norm_bound() > 1.0 + 1e-9)
            throw ConfigError("generators must have sup norm <= 1");
    }
    if (params.grid_count < 2) throw ConfigError("proxy grid needs >= 2 points");

    ConstructionResult result{g0, {}, {}, false};
    LayeredSamplingFunction current = g0;
    double delta_prev = 1.0;

    for (std::size_t stage = 1; stage <= params.epsilons.size(); ++stage) {
        const double epsilon = params.epsilons[stage - 1];
        StageRecord record;
        record.stage = static_cast<int>(stage);
        record.epsilon = epsilon;
        record.trials = params.trials;

        record.partial_sum_passes = proxy_passes(current, spec, params, epsilon, budget);
        if (!record.partial_sum_passes) {
            record.note = "partial sum fails the stage proxy";
            result.stages.push_back(record);
            result.function = current;
            return result;
        }

        // downward halving; starting strictly below delta_prev / 2 keeps the
        // schedule strictly halving
        double candidate = 0.499 * delta_prev;
        bool accepted = false;
        while (candidate >= params.delta_min) {
            ++record.candidates_tried;
            bool all_pass = true;
            for (int trial = 0; trial < params.trials && all_pass; ++trial) {
                const std::uint64_t trial_seed = mix_seed(
                    params.seed, stage * 1000003ULL + record.candidates_tried * 1009ULL + trial);
                const LayeredSamplingFunction direction =
                    random_direction(spec, current.radius(), trial_seed, budget);
                const LayeredSamplingFunction perturbed =
                    current + direction.scaled(candidate);
                all_pass = proxy_passes(perturbed, spec, params, epsilon, budget);
            }
            if (all_pass) {
                accepted = true;
                break;
            }
            candidate *= 0.5;
        }

        if (!accepted) {
            record.note = "no passing delta above the floor " + std::to_string(params.delta_min);
            result.stages.push_back(record);
            result.function = current;
            return result;
        }

        record.delta = candidate;
        record.passed = true;
        result.stages.push_back(record);
        result.delta_schedule.push_back(candidate);
        delta_prev = candidate;
        current = current + generators[stage - 1].scaled(candidate / 2.0);
    }

    result.function = current;
    result.completed = true;
    return result;
}

}  // namespace cocyclelab::approximation
