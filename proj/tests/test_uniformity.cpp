#include <doctest.h>

#include <cmath>
#include <random>

#include "cocyclelab/errors.hpp"
#include "cocyclelab/uniformity.hpp"

using namespace cocyclelab;
using namespace cocyclelab::uniformity;

namespace {

LocallyConstantCocycle free_cocycle(double energy) {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    return schrodinger_cocycle(LayeredSamplingFunction::constant(0.0, spec), spec, energy);
}

LocallyConstantCocycle random_cocycle(const SubshiftSpec& spec, int radius, std::uint64_t seed,
                                      double spread) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-spread, spread);
    std::map<Word, Mat2> table;
    for (const Word& w : factor_set(spec, 2 * radius + 1).words) {
        while (true) {
            Mat2 m{unit(rng), unit(rng), unit(rng), unit(rng)};
            double det = m.det();
            if (det < 0.0) {
                m.c = -m.c;
                m.d = -m.d;
                det = -det;
            }
            if (det > 0.05) {
                table[w] = (1.0 / std::sqrt(det)) * m;
                break;
            }
        }
    }
    return LocallyConstantCocycle(spec, radius, std::move(table));
}

}  // namespace

TEST_CASE("propagate_upper_bound: formula and validation") {
    CHECK(propagate_upper_bound(2, 0.5, 1.0, 2.0) == 16);
    CHECK(propagate_upper_bound(1, 0.0, 1.0, 0.0) == 0);
    CHECK_THROWS_AS(propagate_upper_bound(2, 1.0, 1.0, 2.0), ConfigError);
    CHECK_THROWS_AS(propagate_upper_bound(2, 1.5, 1.0, 2.0), ConfigError);

    // measured M at scale k transfers the bound to [N, 4N]
    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    const LocallyConstantCocycle cocycle = schrodinger_cocycle(
        LayeredSamplingFunction::indicator('b', fib), fib, 0.0);
    const std::int64_t k = 8;
    const double M = sup_exponent_exact(cocycle, k).max_exp;
    const double L = M + 0.2;
    const std::int64_t N = propagate_upper_bound(k, M, L, cocycle.max_step_log_norm());
    const std::vector<ExponentPair> profile = exponent_profile(cocycle, 4 * N);
    for (std::int64_t n = N; n <= 4 * N; ++n) CHECK(profile[n - 1].max_exp < L);
}

TEST_CASE("window_check: examples and the transferred bound") {
    const LocallyConstantCocycle identity = LocallyConstantCocycle::constant(
        SubshiftSpec::periodic("a"), Mat2::identity());
    CHECK(window_check(identity, 3, 0.1));

    const LocallyConstantCocycle diag = LocallyConstantCocycle::constant(
        SubshiftSpec::periodic("a"), Mat2::diagonal(2.0, 0.5));
    CHECK_FALSE(window_check(diag, 3, 0.5));

    // parabolic free cocycle at the band edge: linear norm growth
    const LocallyConstantCocycle parabolic = free_cocycle(2.0);
    CHECK(window_check(parabolic, 64, 0.1));
    const std::vector<ExponentPair> profile = exponent_profile(parabolic, 1024);
    for (std::int64_t n = 64; n <= 1024; ++n) CHECK(profile[n - 1].max_exp < 0.1);

    // a window_check success transfers beyond 2N on random cocycles too
    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    std::mt19937_64 seeds(303);
    for (int trial = 0; trial < 5; ++trial) {
        const LocallyConstantCocycle cocycle = random_cocycle(fib, 1, seeds(), 1.0);
        const std::int64_t N = 16;
        const double L = 0.02 + [&] {
            double top = 0.0;
            const std::vector<ExponentPair> p = exponent_profile(cocycle, 2 * N);
            for (std::int64_t k = N; k <= 2 * N; ++k) top = std::max(top, p[k - 1].max_exp);
            return top;
        }();
        REQUIRE(window_check(cocycle, N, L));
        const std::vector<ExponentPair> extended = exponent_profile(cocycle, 8 * N);
        for (std::int64_t n = 2 * N + 1; n <= 8 * N; ++n)
            CHECK(extended[n - 1].max_exp < L);
    }
}

TEST_CASE("step_bound_residual: closed forms and seeded sweep") {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const Word configuration = expand_prefix(spec, 256);

    const LocallyConstantCocycle identity =
        LocallyConstantCocycle::constant(spec, Mat2::identity());
    const auto [id_lhs, id_rhs] = step_bound_residual(identity, configuration, 0, 10);
    CHECK(id_lhs == 0.0);
    CHECK(id_rhs == 0.0);

    const LocallyConstantCocycle loxodromic = LocallyConstantCocycle::constant(
        spec, Mat2::diagonal(std::exp(1.0), std::exp(-1.0)));
    const auto [lox_lhs, lox_rhs] = step_bound_residual(loxodromic, configuration, 0, 9);
    CHECK(lox_lhs <= 1e-12);
    CHECK(lox_rhs == doctest::Approx(2.0 / 10.0));

    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    const Word fib_configuration = expand_prefix(fib, 256);
    std::mt19937_64 seeds(404);
    for (int trial = 0; trial < 50; ++trial) {
        const LocallyConstantCocycle cocycle = random_cocycle(fib, 1, seeds(), 2.0);
        for (std::int64_t n = 1; n <= 40; ++n) {
            const auto [lhs, rhs] = step_bound_residual(cocycle, fib_configuration, 2, n);
            CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
        }
    }
}

TEST_CASE("var_n: vanishes without omega dependence") {
    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    const std::vector<double> grid{-1.0, 0.0, 2.0};

    const CocycleFamily free_family = CocycleFamily::schrodinger(
        LayeredSamplingFunction::constant(0.0, fib), fib, -1.0, 2.0);
    CHECK(var_n(free_family, grid, 32) <= 1e-12);

    const CocycleFamily identity_family = CocycleFamily::constant_in_energy(
        LocallyConstantCocycle::constant(fib, Mat2::identity()), 0.0, 1.0);
    CHECK(var_n(identity_family, grid, 16) == 0.0);

    // var over the grid equals the slice-wise log-norm spread
    const CocycleFamily coupled = CocycleFamily::schrodinger(
        LayeredSamplingFunction::indicator('b', fib), fib, -1.0, 2.0);
    const std::int64_t n = 12;
    double oracle = 0.0;
    for (double energy : grid) {
        const ExponentExtrema extrema = sup_exponent_exact(coupled.slice(energy), n);
        oracle = std::max(oracle, static_cast<double>(n) * (extrema.max_exp - extrema.min_exp));
    }
    CHECK(var_n(coupled, grid, n) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("uniformity_verdict: identity family is uniform, the union fixture is not") {
    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    const std::vector<std::int64_t> horizons{8, 16, 32};

    const CocycleFamily identity_family = CocycleFamily::constant_in_energy(
        LocallyConstantCocycle::constant(fib, Mat2::identity()), 0.0, 1.0);
    const UniformityReport uniform =
        uniformity_verdict(identity_family, {0.0, 0.5, 1.0}, horizons, 0.1);
    CHECK(uniform.verdict.kind == VerdictKind::Uniform);
    CHECK(uniform.verdict.band.has_value());
    for (const auto& p : uniform.var_trace) CHECK(p.var_over_n == 0.0);

    // diagonal cocycle over two periodic components: Birkhoff averages 1 and 2
    const SubshiftSpec fixture = SubshiftSpec::disjoint_union(
        {SubshiftSpec::periodic("a"), SubshiftSpec::periodic("b")});
    const LayeredSamplingFunction f =
        LayeredSamplingFunction::constant(1.0, fixture) +
        LayeredSamplingFunction::indicator('b', fixture);
    const CocycleFamily split = CocycleFamily::constant_in_energy(
        hyperbolicity::diagonal_cocycle(f, fixture), 0.0, 0.0);
    const UniformityReport undecided = uniformity_verdict(split, {0.0}, horizons, 0.5);
    CHECK(undecided.verdict.kind == VerdictKind::Undecided);
    for (const auto& p : undecided.var_trace)
        CHECK(p.var_over_n == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("w_epsilon_test: free cocycle classifications") {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const CocycleFamily family = CocycleFamily::schrodinger(
        LayeredSamplingFunction::constant(0.0, spec), spec, 0.0, 3.0);

    const std::vector<EnergyClassification> classes =
        w_epsilon_test(family, {0.0, 2.0, 3.0}, 0.05, 512);

    CHECK(classes[0].cls == EnergyClass::SmallExponent);  // rotation of order 4
    CHECK(classes[0].certified_from.value() <= 4);

    CHECK(classes[1].cls == EnergyClass::SmallExponent);  // parabolic, linear growth
    CHECK(classes[1].certified_from.value() > 4);

    CHECK(classes[2].cls == EnergyClass::UhCertified);
    CHECK(classes[2].certificate.has_value());
    CHECK(classes[2].certificate->exponent_lower_bound > 0.0);
}

TEST_CASE("avalanche_check: refusals and certificates") {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const AvalancheParams params;  // kappa 20, lambda0 10

    const LocallyConstantCocycle identity =
        LocallyConstantCocycle::constant(spec, Mat2::identity());
    const AvalancheOutcome refusal = avalanche_check(identity, 1.0, 20, 0.05, params, 256);
    CHECK_FALSE(refusal.certified());
    CHECK(refusal.refused_condition == "a2");

    // constant diag(2, 1/2): exponent is exactly log 2 at every scale
    const double L = std::log(2.0);
    const std::int64_t l = 20;  // minimal for (a3) at these constants
    const LocallyConstantCocycle diag =
        LocallyConstantCocycle::constant(spec, Mat2::diagonal(2.0, 0.5));
    const AvalancheOutcome cert = avalanche_check(diag, L, l, 0.05, params, 512);
    REQUIRE(cert.certified());
    CHECK(cert.certificate->band_validated);
    CHECK(cert.certificate->band.lo == doctest::Approx(L * (1.0 - 44.0 * 0.05)));
    CHECK(cert.certificate->band.hi == doctest::Approx(L * 1.05));

    // free Schrodinger at E = 3 with the closed-form exponent
    const double L3 = std::log((3.0 + std::sqrt(5.0)) / 2.0);
    const std::int64_t l3 = static_cast<std::int64_t>(std::ceil(params.lambda0 / (0.75 * L3)));
    const AvalancheOutcome cert3 = avalanche_check(free_cocycle(3.0), L3, l3, 0.08, params, 512);
    REQUIRE(cert3.certified());
    CHECK(cert3.certificate->band_validated);

    CHECK_THROWS_AS(avalanche_check(diag, L, l, 0.2, params, 64), ConfigError);
    CHECK_THROWS_AS(avalanche_check(diag, -1.0, l, 0.05, params, 64), ConfigError);
}

TEST_CASE("openness_probe: perturbation stability and the vacuous failure") {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const AvalancheParams params;
    const LocallyConstantCocycle diag =
        LocallyConstantCocycle::constant(spec, Mat2::diagonal(2.0, 0.5));

    const OpennessReport pass = openness_probe(diag, std::log(2.0), 20, 0.05, 0.08, 1e-3, 20,
                                               params, 256, 99);
    CHECK(pass.passed);
    CHECK(pass.failures == 0);

    const LocallyConstantCocycle identity =
        LocallyConstantCocycle::constant(spec, Mat2::identity());
    const OpennessReport vacuous = openness_probe(identity, 1.0, 20, 0.05, 0.08, 1e-3, 5,
                                                  params, 256, 99);
    CHECK_FALSE(vacuous.passed);
    CHECK(vacuous.base_refusal == "a2");

    CHECK_THROWS_AS(openness_probe(diag, std::log(2.0), 20, 0.08, 0.05, 1e-3, 5, params, 256, 1),
                    ConfigError);
}

TEST_CASE("perturb_cocycle: seeded and deterministic") {
    const LocallyConstantCocycle diag = LocallyConstantCocycle::constant(
        SubshiftSpec::periodic("ab"), Mat2::diagonal(2.0, 0.5));
    const LocallyConstantCocycle p1 = perturb_cocycle(diag, 1e-3, 7);
    const LocallyConstantCocycle p2 = perturb_cocycle(diag, 1e-3, 7);
    const LocallyConstantCocycle p3 = perturb_cocycle(diag, 1e-3, 8);
    for (const auto& [window, m] : p1.table()) {
        CHECK(m.entrywise_distance(p2.table().at(window)) == 0.0);
        CHECK(std::abs(m.det() - 1.0) <= 1e-12);
        CHECK(m.entrywise_distance(diag.eval(window)) <= 2e-3);
    }
    bool differs = false;
    for (const auto& [window, m] : p1.table())
        differs = differs || m.entrywise_distance(p3.table().at(window)) > 0.0;
    CHECK(differs);
}
