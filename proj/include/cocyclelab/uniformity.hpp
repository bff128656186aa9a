#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/hyperbolicity.hpp"

namespace cocyclelab::uniformity {

struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

enum class VerdictKind { UhCertified, SmallExponent, Uniform, Undecided };

std::string to_string(VerdictKind kind);

struct Verdict {
    VerdictKind kind = VerdictKind::Undecided;
    double epsilon = 0.0;
    double lyapunov = 0.0;  // finite-scale estimate, not a limit
    std::optional<Band> band;
};

struct ExponentTracePoint {
    std::int64_t n = 0;
    double sup_exp = 0.0;
    double min_exp = 0.0;
};

struct VarTracePoint {
    std::int64_t n = 0;
    double var_over_n = 0.0;
};

struct TraceParams {
    double e_min = 0.0, e_max = 0.0;
    std::size_t grid_size = 0;
    double epsilon = 0.0;
    std::vector<std::int64_t> horizons;
};

// Finite-scale diagnostics; the verdict is a proxy statement about the
// computed horizons, never a proof.
struct UniformityReport {
    std::vector<ExponentTracePoint> exponent_trace;
    std::vector<VarTracePoint> var_trace;
    Verdict verdict;
    TraceParams params;
};

// Smallest N (ceiled) such that measuring M = sup (1/k) log ||A_k|| < L at
// scale k pushes the bound (1/n) log ||A_n|| < L to every n >= N:
// N = ceil(2 k c_max / (L - M)), c_max = max_w log ||A(w)||.
std::int64_t propagate_upper_bound(std::int64_t k, double M, double L, double c_max);

// True iff sup (1/k) log ||A_k|| < L exactly (factor enumeration) for every
// k in [N, 2N]; a true answer transfers the bound to all n >= N.
bool window_check(const LocallyConstantCocycle& cocycle, std::int64_t N, double L,
                  const Budget& budget = {});

// (lhs, rhs) of the one-step exponent oscillation bound
//   | log||A_{n+1}||/(n+1) - log||A_n||/n |
//     <= (1/(n+1)) (log||A_n||/n) + c/(n+1).
std::pair<double, double> step_bound_residual(const LocallyConstantCocycle& cocycle,
                                              const Word& configuration, std::int64_t start,
                                              std::int64_t n);

// max over the energy grid of (exact max - exact min) of log ||A_n(E, .)||
// over the subshift
double var_n(const CocycleFamily& family, const std::vector<double>& grid, std::int64_t n,
             const Budget& budget = {});

struct FamilyTraces {
    std::vector<ExponentTracePoint> exponent_trace;
    std::vector<VarTracePoint> var_trace;
};

// One enumeration at the top horizon shared across the whole grid.
FamilyTraces family_traces(const CocycleFamily& family, const std::vector<double>& grid,
                           const std::vector<std::int64_t>& horizons, const Budget& budget = {},
                           int threads = 1);

// Verdict `uniform` iff min over horizons of Var_n / n < epsilon.
UniformityReport uniformity_verdict(const CocycleFamily& family, const std::vector<double>& grid,
                                    const std::vector<std::int64_t>& horizons, double epsilon,
                                    const Budget& budget = {}, int threads = 1);

enum class EnergyClass { UhCertified, SmallExponent, Fail };

std::string to_string(EnergyClass cls);

struct EnergyClassification {
    double energy = 0.0;
    EnergyClass cls = EnergyClass::Fail;
    std::optional<std::int64_t> certified_from;  // small-exponent scale k
    std::optional<hyperbolicity::UhCertificate> certificate;
    double exponent_at_horizon = 0.0;
    std::string note;
};

struct WEpsilonParams {
    double uh_margin = 1e-3;
    std::int64_t uh_block_max = 16;
};

// Per-energy classification: uniformly hyperbolic (cone certificate,
// preferred), or exponent < epsilon from some k on (window check), or fail.
std::vector<EnergyClassification> w_epsilon_test(const CocycleFamily& family,
                                                 const std::vector<double>& grid, double epsilon,
                                                 std::int64_t horizon_k,
                                                 const WEpsilonParams& params = {},
                                                 const Budget& budget = {}, int threads = 1);

// Constants of the block-product norm estimate; the underlying principle
// only asserts their existence, so they are configuration, and every
// certificate records the values used.
struct AvalancheParams {
    double kappa = 20.0;
    double lambda0 = 10.0;
};

struct AvalancheCertificate {
    double L = 0.0;
    double epsilon = 0.0;
    std::int64_t block_l = 0;
    AvalancheParams params;
    Band band;  // [L(1 - 44 eps), L(1 + eps)]
    std::int64_t validation_horizon = 0;
    bool band_validated = false;
    double worst_band_margin = 0.0;  // min distance of observed exponents to the band edges
};

struct AvalancheOutcome {
    std::optional<AvalancheCertificate> certificate;
    std::string refused_condition;  // first violated of a1..a4; empty when certified
    std::string detail;
    bool certified() const { return certificate.has_value(); }
};

// Checks (a1) sup exponent <= L(1+eps) on [l, validation_horizon],
// (a2) min exponent at 2l >= L(1-eps), (a3) (3/4) L l >= lambda0,
// (a4) (2 kappa / exp(lambda0)) / l < eps L; on success certifies the band
// [L(1-44 eps), L(1+eps)] and validates it on [l, validation_horizon].
AvalancheOutcome avalanche_check(const LocallyConstantCocycle& cocycle, double L, std::int64_t l,
                                 double epsilon, const AvalancheParams& params,
                                 std::int64_t validation_horizon, const Budget& budget = {});

struct OpennessReport {
    bool passed = false;
    int trials = 0;
    int failures = 0;
    std::string base_refusal;  // nonempty when the unperturbed check already fails
};

// Stability of an avalanche certificate under table perturbations: all
// `trials` seeded det-renormalized perturbations of size `perturbation_size`
// must still certify at the looser epsilon_prime.
OpennessReport openness_probe(const LocallyConstantCocycle& cocycle, double L, std::int64_t l,
                              double epsilon, double epsilon_prime, double perturbation_size,
                              int trials, const AvalancheParams& params,
                              std::int64_t validation_horizon, std::uint64_t seed,
                              const Budget& budget = {});

// Seeded entrywise perturbation, renormalized back to determinant one.
LocallyConstantCocycle perturb_cocycle(const LocallyConstantCocycle& cocycle, double size,
                                       std::uint64_t seed, const Budget& budget = {});

}  // namespace cocyclelab::uniformity
