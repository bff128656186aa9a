#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/uniformity.hpp"

namespace cocyclelab::approximation {

// Truncation of a layered sampling function to layers of radius <= r; the
// returned bound sum |c_j| sup|layer_j| (dropped layers) + tail dominates
// ||f - f_r||_inf by construction.
struct DiscretizationResult {
    LayeredSamplingFunction function;
    double error_bound = 0.0;
};

DiscretizationResult discretize_sampling(const LayeredSamplingFunction& f, int radius);

// Locally-constant-in-omega family blended from slices at uniform energy
// nodes with piecewise-linear hat weights (exact partition of unity on J),
// renormalized to determinant one, extended constantly outside J.
struct BlendedFamily {
    SubshiftSpec spec;
    int radius = 0;
    double j_min = 0.0, j_max = 0.0;
    std::vector<double> nodes;
    std::vector<Word> windows;
    std::vector<std::vector<Mat2>> tables;  // per node, indexed like `windows`

    Mat2 eval(double energy, const Word& window) const;
    // blended matrix before determinant renormalization
    Mat2 eval_raw(double energy, const Word& window) const;
    CocycleFamily as_family() const;
};

struct ApproximationResult {
    BlendedFamily family;
    double requested_error = 0.0;
    double achieved_sup_error = 0.0;  // over the verification sample
    int cover_count = 0;
    double min_blend_det = 1.0;       // before renormalization
    double max_blend_det = 1.0;
};

// Energy cover refined (doubling) until the sampled sup error of the
// renormalized blend is <= epsilon.  Throws ConfigError on cover-refinement
// failure or when a blended determinant stays non-positive at the maximal
// cover.
ApproximationResult approximate_family(const CocycleFamily& family, double j_min, double j_max,
                                       double epsilon, int initial_cover = 9,
                                       int max_cover = 4097, int verify_per_cell = 8,
                                       const Budget& budget = {});

struct ConstructionParams {
    std::vector<double> epsilons;  // strictly decreasing stage targets
    std::int64_t horizon = 512;
    double grid_min = -3.0;
    double grid_max = 3.0;
    int grid_count = 41;
    int trials = 16;
    double delta_min = 1e-6;
    std::uint64_t seed = 1;
    uniformity::WEpsilonParams w_params{};
    int threads = 1;
};

struct StageRecord {
    int stage = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    int candidates_tried = 0;
    int trials = 0;
    bool partial_sum_passes = false;
    bool passed = false;
    std::string note;
};

struct ConstructionResult {
    LayeredSamplingFunction function;  // g0 + sum over completed stages of (delta_k/2) g_k
    std::vector<StageRecord> stages;
    std::vector<double> delta_schedule;
    bool completed = false;
    // fixed wording; every log carries it
    std::string certification =
        "finite-horizon, finite-grid proxy certification; membership is tested, not proved";
};

// Iterative construction: at stage k, find (by seeded downward halving from
// just under delta_{k-1}/2) a delta_k such that all random sup-delta_k
// perturbations of the current sum keep every grid energy uh-certified or
// below epsilon_k at the horizon, then add (delta_k/2) g_k.  The schedule is
// strictly halving by construction.  A failed search aborts the stage and
// returns the partial construction with a diagnostic.
ConstructionResult construct_uniform_potential(const LayeredSamplingFunction& g0,
                                               const std::vector<LayeredSamplingFunction>& generators,
                                               const SubshiftSpec& spec,
                                               const ConstructionParams& params,
                                               const Budget& budget = {});

}  // namespace cocyclelab::approximation
