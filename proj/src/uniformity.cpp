#include "cocyclelab/uniformity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cocyclelab/errors.hpp"
#include "parallel.hpp"

namespace cocyclelab::uniformity {

std::string to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::UhCertified: return "uh-certified";
        case VerdictKind::SmallExponent: return "small-exponent";
        case VerdictKind::Uniform: return "uniform";
        case VerdictKind::Undecided: return "undecided";
    }
    return "undecided";
}

std::string to_string(EnergyClass cls) {
    switch (cls) {
        case EnergyClass::UhCertified: return "uh-certified";
        case EnergyClass::SmallExponent: return "small-exponent";
        case EnergyClass::Fail: return "fail";
    }
    return "fail";
}

std::int64_t propagate_upper_bound(std::int64_t k, double M, double L, double c_max) {
    if (k < 1) throw ConfigError("scale k must be >= 1");
    if (c_max < 0.0) throw ConfigError("c_max must be >= 0");
    if (!(M < L)) throw ConfigError("propagate_upper_bound needs M < L");
    return static_cast<std::int64_t>(
        std::ceil(2.0 * static_cast<double>(k) * c_max / (L - M)));
}

bool window_check(const LocallyConstantCocycle& cocycle, std::int64_t N, double L,
                  const Budget& budget) {
    if (N < 1) throw ConfigError("window start N must be >= 1");
    const std::vector<ExponentPair> profile = exponent_profile(cocycle, 2 * N, budget);
    for (std::int64_t k = N; k <= 2 * N; ++k)
        if (!(profile[k - 1].max_exp < L)) return false;
    return true;
}

std::pair<double, double> step_bound_residual(const LocallyConstantCocycle& cocycle,
                                              const Word& configuration, std::int64_t start,
                                              std::int64_t n) {
    if (n < 1) throw ConfigError("step bound needs n >= 1");
    const double log_n = iterate_scaled(cocycle, configuration, start, n).log_norm();
    const double log_n1 = iterate_scaled(cocycle, configuration, start, n + 1).log_norm();
    const double c = cocycle.max_step_log_norm();
    const double lhs = std::abs(log_n1 / static_cast<double>(n + 1) -
                                log_n / static_cast<double>(n));
    const double rhs = (log_n / static_cast<double>(n) + c) / static_cast<double>(n + 1);
    return {lhs, rhs};
}

namespace {

// max and min of log ||A_n|| over the compiled factor set (product only; no
// intermediate norms)
std::pair<double, double> log_norm_extrema(const CompiledEnsemble& ensemble,
                                           const std::vector<Mat2>& mats) {
    double max_log = -std::numeric_limits<double>::infinity();
    double min_log = std::numeric_limits<double>::infinity();
    for (const auto& seq : ensemble.factors) {
        ScaledMat2 product;
        for (std::int32_t id : seq) product.multiply_left(mats[id]);
        const double log_norm = product.log_norm();
        max_log = std::max(max_log, log_norm);
        min_log = std::min(min_log, log_norm);
    }
    return {max_log, min_log};
}

}  // namespace

double var_n(const CocycleFamily& family, const std::vector<double>& grid, std::int64_t n,
             const Budget& budget) {
    if (grid.empty()) throw ConfigError("energy grid must be nonempty");
    const CompiledEnsemble ensemble = compile_ensemble(family.spec(), family.radius(), n, budget);
    double var = 0.0;
    for (double energy : grid) {
        const auto [max_log, min_log] =
            log_norm_extrema(ensemble, family.materialize(energy, ensemble.windows));
        var = std::max(var, max_log - min_log);
    }
    return var;
}

FamilyTraces family_traces(const CocycleFamily& family, const std::vector<double>& grid,
                           const std::vector<std::int64_t>& horizons, const Budget& budget,
                           int threads) {
    if (grid.empty()) throw ConfigError("energy grid must be nonempty");
    if (horizons.empty()) throw ConfigError("horizons must be nonempty");
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (horizons[i] <= horizons[i - 1]) throw ConfigError("horizons must be ascending");

    const CompiledEnsemble ensemble =
        compile_ensemble(family.spec(), family.radius(), horizons.back(), budget);
    std::vector<std::vector<ExponentPair>> per_energy(grid.size());
    detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
        per_energy[i] =
            exponent_profile_compiled(ensemble, family.materialize(grid[i], ensemble.windows));
    });

    FamilyTraces traces;
    for (std::int64_t n : horizons) {
        ExponentTracePoint exp_point{n, -std::numeric_limits<double>::infinity(),
                                     std::numeric_limits<double>::infinity()};
        double var_over_n = 0.0;
        for (const auto& profile : per_energy) {
            const ExponentPair& p = profile[n - 1];
            exp_point.sup_exp = std::max(exp_point.sup_exp, p.max_exp);
            exp_point.min_exp = std::min(exp_point.min_exp, p.min_exp);
            var_over_n = std::max(var_over_n, p.max_exp - p.min_exp);
        }
        traces.exponent_trace.push_back(exp_point);
        traces.var_trace.push_back({n, var_over_n});
    }
    return traces;
}

UniformityReport uniformity_verdict(const CocycleFamily& family, const std::vector<double>& grid,
                                    const std::vector<std::int64_t>& horizons, double epsilon,
                                    const Budget& budget, int threads) {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    FamilyTraces traces = family_traces(family, grid, horizons, budget, threads);

    UniformityReport report;
    report.exponent_trace = std::move(traces.exponent_trace);
    report.var_trace = std::move(traces.var_trace);
    report.params = {family.e_min(), family.e_max(), grid.size(), epsilon, horizons};

    double min_var = std::numeric_limits<double>::infinity();
    for (const auto& p : report.var_trace) min_var = std::min(min_var, p.var_over_n);

    report.verdict.epsilon = epsilon;
    report.verdict.lyapunov = report.exponent_trace.back().sup_exp;
    if (min_var < epsilon) {
        report.verdict.kind = VerdictKind::Uniform;
        const double L = report.verdict.lyapunov;
        report.verdict.band = Band{L * (1.0 - 44.0 * epsilon), L * (1.0 + epsilon)};
    } else {
        report.verdict.kind = VerdictKind::Undecided;
    }
    return report;
}

std::vector<EnergyClassification> w_epsilon_test(const CocycleFamily& family,
                                                 const std::vector<double>& grid, double epsilon,
                                                 std::int64_t horizon_k,
                                                 const WEpsilonParams& params,
                                                 const Budget& budget, int threads) {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (horizon_k < 2) throw ConfigError("horizon must be >= 2");

    const CompiledEnsemble ensemble =
        compile_ensemble(family.spec(), family.radius(), horizon_k, budget);

    std::vector<EnergyClassification> out(grid.size());
    detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
        EnergyClassification& entry = out[i];
        entry.energy = grid[i];

        // UH first: the stronger and mutually exclusive verdict.
        try {
            const LocallyConstantCocycle slice = family.slice(grid[i], budget);
            for (std::int64_t block = 1; block <= params.uh_block_max; block *= 2) {
                hyperbolicity::UhResult uh =
                    hyperbolicity::certify_uh(slice, block, params.uh_margin, budget);
                if (uh.certified()) {
                    entry.cls = EnergyClass::UhCertified;
                    entry.certificate = std::move(uh.certificate);
                    break;
                }
            }
            const std::vector<ExponentPair> profile =
                exponent_profile_compiled(ensemble, family.materialize(grid[i], ensemble.windows));
            entry.exponent_at_horizon = profile.back().max_exp;
            if (entry.cls == EnergyClass::UhCertified) return;

            // smallest window start whose whole [N, 2N] stays below epsilon
            for (std::int64_t N = 1; 2 * N <= horizon_k; ++N) {
                bool ok = true;
                for (std::int64_t k = N; k <= 2 * N && ok; ++k)
                    ok = profile[k - 1].max_exp < epsilon;
                if (ok) {
                    entry.cls = EnergyClass::SmallExponent;
                    entry.certified_from = N;
                    return;
                }
            }
            entry.cls = EnergyClass::Fail;
        } catch (const BudgetError& e) {
            entry.cls = EnergyClass::Fail;
            entry.note = std::string("budget: ") + e.what();
        }
    });
    return out;
}

AvalancheOutcome avalanche_check(const LocallyConstantCocycle& cocycle, double L, std::int64_t l,
                                 double epsilon, const AvalancheParams& params,
                                 std::int64_t validation_horizon, const Budget& budget) {
    if (!(epsilon > 0.0 && epsilon < 1.0 / 12.0))
        throw ConfigError("avalanche check needs 0 < epsilon < 1/12");
    if (!(L > 0.0)) throw ConfigError("avalanche check needs L > 0");
    if (l < 1) throw ConfigError("avalanche check needs l >= 1");
    if (!(params.kappa > 0.0 && params.lambda0 > 0.0))
        throw ConfigError("avalanche constants must be positive");

    const std::int64_t horizon = std::max(validation_horizon, 2 * l);
    const std::vector<ExponentPair> profile = exponent_profile(cocycle, horizon, budget);

    AvalancheOutcome out;
    // (a1) upper bound on the whole validation window
    for (std::int64_t n = l; n <= horizon; ++n) {
        if (profile[n - 1].max_exp > L * (1.0 + epsilon)) {
            out.refused_condition = "a1";
            out.detail = "sup exponent " + std::to_string(profile[n - 1].max_exp) +
                         " at n=" + std::to_string(n) + " exceeds L(1+eps)=" +
                         std::to_string(L * (1.0 + epsilon));
            return out;
        }
    }
    // (a2) lower bound at scale 2l
    if (profile[2 * l - 1].min_exp < L * (1.0 - epsilon)) {
        out.refused_condition = "a2";
        out.detail = "min exponent " + std::to_string(profile[2 * l - 1].min_exp) +
                     " at n=2l is below L(1-eps)=" + std::to_string(L * (1.0 - epsilon));
        return out;
    }
    // (a3)
    if (!(0.75 * L * static_cast<double>(l) >= params.lambda0)) {
        out.refused_condition = "a3";
        out.detail = "(3/4) L l = " + std::to_string(0.75 * L * static_cast<double>(l)) +
                     " is below lambda0 = " + std::to_string(params.lambda0);
        return out;
    }
    // (a4)
    if (!(2.0 * params.kappa / std::exp(params.lambda0) / static_cast<double>(l) < epsilon * L)) {
        out.refused_condition = "a4";
        out.detail = "2 kappa / (l exp(lambda0)) is not below eps L";
        return out;
    }

    AvalancheCertificate cert;
    cert.L = L;
    cert.epsilon = epsilon;
    cert.block_l = l;
    cert.params = params;
    cert.band = {L * (1.0 - 44.0 * epsilon), L * (1.0 + epsilon)};
    cert.validation_horizon = horizon;
    cert.band_validated = true;
    cert.worst_band_margin = std::numeric_limits<double>::infinity();
    for (std::int64_t n = l; n <= horizon; ++n) {
        const ExponentPair& p = profile[n - 1];
        const double margin = std::min(p.min_exp - cert.band.lo, cert.band.hi - p.max_exp);
        cert.worst_band_margin = std::min(cert.worst_band_margin, margin);
        if (margin < 0.0) cert.band_validated = false;
    }
    out.certificate = std::move(cert);
    return out;
}

LocallyConstantCocycle perturb_cocycle(const LocallyConstantCocycle& cocycle, double size,
                                       std::uint64_t seed, const Budget& budget) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::map<Word, Mat2> table;
    for (const auto& [window, m] : cocycle.table()) {
        Mat2 perturbed;
        int attempts = 0;
        do {
            perturbed = m + size * Mat2{unit(rng), unit(rng), unit(rng), unit(rng)};
            if (++attempts > 64)
                throw ConfigError("perturbation size " + std::to_string(size) +
                                  " keeps producing non-positive determinants");
        } while (!(perturbed.det() > 0.0));
        table[window] = perturbed;
    }
    return LocallyConstantCocycle(cocycle.spec(), cocycle.window_radius(), std::move(table),
                                  LocallyConstantCocycle::kDefaultDetTol, budget);
}

OpennessReport openness_probe(const LocallyConstantCocycle& cocycle, double L, std::int64_t l,
                              double epsilon, double epsilon_prime, double perturbation_size,
                              int trials, const AvalancheParams& params,
                              std::int64_t validation_horizon, std::uint64_t seed,
                              const Budget& budget) {
    if (!(epsilon < epsilon_prime && epsilon_prime < 1.0 / 12.0))
        throw ConfigError("openness probe needs epsilon < epsilon' < 1/12");
    OpennessReport report;
    report.trials = trials;

    const AvalancheOutcome base =
        avalanche_check(cocycle, L, l, epsilon, params, validation_horizon, budget);
    if (!base.certified()) {
        report.base_refusal = base.refused_condition.empty() ? "uncertified"
                                                             : base.refused_condition;
        return report;
    }

    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = seed ^ (0x9E3779B97F4A7C15ULL * (t + 1));
        const LocallyConstantCocycle perturbed =
            perturb_cocycle(cocycle, perturbation_size, trial_seed, budget);
        const AvalancheOutcome outcome = avalanche_check(perturbed, L, l, epsilon_prime, params,
                                                         validation_horizon, budget);
        if (!outcome.certified() || !outcome.certificate->band_validated) ++report.failures;
    }
    report.passed = report.failures == 0;
    return report;
}

}  // namespace cocyclelab::uniformity
