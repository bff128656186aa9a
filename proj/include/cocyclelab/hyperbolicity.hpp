#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cocyclelab/cocycle.hpp"

namespace cocyclelab::hyperbolicity {

// Arc on the projective circle (directions mod pi): center in [0, pi),
// half_width in (0, pi/2).
struct Cone {
    double center = 0.0;
    double half_width = 0.0;
};

// Strictly invariant cone family at block length N: for every legal word of
// length N + 2r, the image of the source-window cone under the N-step block
// lies inside the target-window cone with angular margin >= `margin`, and
// vectors in the source cone are stretched by at least 1 + margin.
struct UhCertificate {
    std::int64_t block_length = 0;
    double margin = 0.0;
    double min_expansion = 0.0;        // over all blocks and cone directions
    double exponent_lower_bound = 0.0; // log(min_expansion) / block_length
    double min_angular_margin = 0.0;
    std::map<Word, Cone> cones;
};

struct UhRefusal {
    // "no-invariant-family" (try a larger block length) or "budget"
    std::string reason;
    std::string detail;
};

struct UhResult {
    std::optional<UhCertificate> certificate;
    std::optional<UhRefusal> refusal;
    bool certified() const { return certificate.has_value(); }
};

// Cone-based uniform hyperbolicity check at a fixed block length.  Cones are
// seeded from the dominant image direction of each arriving block and
// tightened by sweeping images until the family stabilizes (at most 64
// sweeps).  Refusal is inconclusive: a liminf-style lower bound is not
// finitely checkable, so failure only means no certificate at this scale.
UhResult certify_uh(const LocallyConstantCocycle& cocycle, std::int64_t block_length,
                    double margin, const Budget& budget = {});

// Re-runs the containment and expansion checks of an issued certificate.
bool verify_uh_certificate(const LocallyConstantCocycle& cocycle, const UhCertificate& cert,
                           const Budget& budget = {});

struct SplittingPoint {
    std::int64_t position = 0;
    double unstable_angle = 0.0;  // most contracted direction of the backward product
    double stable_angle = 0.0;    // most contracted direction of the forward product
    double equivariance_residual_unstable = 0.0;  // angle(A u(omega), u(T omega))
    double equivariance_residual_stable = 0.0;
    double transversality_angle = 0.0;
};

struct SplittingSample {
    std::vector<SplittingPoint> points;
    double contraction_C = 0.0;       // fitted ||A_k s|| <= C lambda^{-k}
    double contraction_lambda = 0.0;  // > 1 on certified examples
    double max_equivariance_residual = 0.0;
    double min_singular_gap = 0.0;    // relative gap (s1 - s2) / s1 at scale n
};

inline constexpr double kAngleTol = 1e-6;
inline constexpr double kGapTol = 1e-8;

// Numerical unstable/stable directions from the singular frames of A_n at
// sampled orbit positions, with equivariance residuals and a decay fit of
// the contracted direction over k <= n/2.  Throws
// DegenerateSingularValuesError when the singular gap of A_n is below
// kGapTol at some sample.
SplittingSample extract_splitting(const LocallyConstantCocycle& cocycle,
                                  const Word& configuration, std::int64_t n,
                                  int max_samples = 16);

// diag(exp f, exp(-f)) for a finite-layered f >= 1; the finite-scale
// exponent of the result equals the Birkhoff average of f along the same
// window, exactly.
LocallyConstantCocycle diagonal_cocycle(const LayeredSamplingFunction& f,
                                        const SubshiftSpec& spec, const Budget& budget = {});

struct SpreadPoint {
    std::int64_t n = 0;
    double sup_exp = 0.0;
    double min_exp = 0.0;
    double spread() const { return sup_exp - min_exp; }
};

struct SpreadReport {
    std::vector<SpreadPoint> trace;
    double first_spread = 0.0;
    double last_spread = 0.0;
    bool spread_shrinks = false;  // last < first / 2
};

// Finite-scale shadow of the "uniform exponent vs. norm lower bound"
// separation: the exponent spread over the subshift shrinks along horizons
// for uniquely ergodic bases and stays bounded away from zero on the
// disjoint-union fixture.
SpreadReport uh1_vs_uh3_probe(const LocallyConstantCocycle& cocycle,
                              const std::vector<std::int64_t>& horizons,
                              const Budget& budget = {});

}  // namespace cocyclelab::hyperbolicity
