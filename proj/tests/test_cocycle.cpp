#include <doctest.h>

#include <cmath>
#include <random>

#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/errors.hpp"

using namespace cocyclelab;

namespace {

Mat2 random_sl2(std::mt19937_64& rng, double spread = 2.0) {
    std::uniform_real_distribution<double> unit(-spread, spread);
    while (true) {
        Mat2 m{unit(rng), unit(rng), unit(rng), unit(rng)};
        double det = m.det();
        if (det < 0.0) {
            m.c = -m.c;
            m.d = -m.d;
            det = -det;
        }
        if (det > 0.05) return (1.0 / std::sqrt(det)) * m;
    }
}

LocallyConstantCocycle random_cocycle(const SubshiftSpec& spec, int radius,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::map<Word, Mat2> table;
    for (const Word& w : factor_set(spec, 2 * radius + 1).words) table[w] = random_sl2(rng);
    return LocallyConstantCocycle(spec, radius, std::move(table));
}

// power-iteration oracle for the spectral norm
double spectral_norm_oracle(const Mat2& m) {
    double x = 0.6, y = 0.8;
    for (int i = 0; i < 2000; ++i) {
        // v <- A^T A v, normalized
        const auto av = m.apply(x, y);
        const double tx = m.a * av[0] + m.c * av[1];
        const double ty = m.b * av[0] + m.d * av[1];
        const double len = std::hypot(tx, ty);
        x = tx / len;
        y = ty / len;
    }
    const auto av = m.apply(x, y);
    return std::hypot(av[0], av[1]);
}

}  // namespace

TEST_CASE("mat2: spectral norm closed form matches power iteration") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const Mat2 m = random_sl2(rng);
        CHECK(m.spectral_norm() == doctest::Approx(spectral_norm_oracle(m)).epsilon(1e-10));
        CHECK(m.spectral_norm() >= 1.0 - 1e-12);  // det 1 forces norm >= 1
        // unimodular norm symmetry
        CHECK(m.inverse_unimodular().spectral_norm() ==
              doctest::Approx(m.spectral_norm()).epsilon(1e-9));
    }
    CHECK(Mat2::rotation(0.7).spectral_norm() == doctest::Approx(1.0));
    CHECK(Mat2::diagonal(2.0, 0.5).spectral_norm() == doctest::Approx(2.0));
}

TEST_CASE("cocycle eval: table lookups and the illegal-window error") {
    const SubshiftSpec spec = SubshiftSpec::periodic("ab");
    const LocallyConstantCocycle identity =
        LocallyConstantCocycle::constant(spec, Mat2::identity());
    CHECK(identity.eval("a").entrywise_distance(Mat2::identity()) == 0.0);
    CHECK_THROWS_AS(identity.eval("c"), IllegalWindowError);

    const LocallyConstantCocycle diag =
        LocallyConstantCocycle::constant(spec, Mat2::diagonal(2.0, 0.5));
    CHECK(diag.eval("b").a == 2.0);
    CHECK(diag.eval("b").d == 0.5);
}

TEST_CASE("cocycle construction: coverage and determinant policing") {
    const SubshiftSpec spec = SubshiftSpec::fibonacci();
    std::map<Word, Mat2> partial{{"a", Mat2::identity()}};
    CHECK_THROWS_AS(LocallyConstantCocycle(spec, 0, partial), ConfigError);

    std::map<Word, Mat2> drifted{{"a", Mat2::diagonal(2.0 * 1.001, 0.5 * 1.001)},
                                 {"b", Mat2::identity()}};
    const LocallyConstantCocycle fixed(spec, 0, drifted);
    CHECK(fixed.construction_warnings().size() == 1);
    CHECK(fixed.eval("a").det() == doctest::Approx(1.0).epsilon(1e-12));

    std::map<Word, Mat2> negative{{"a", Mat2::diagonal(1.0, -1.0)}, {"b", Mat2::identity()}};
    CHECK_THROWS_AS(LocallyConstantCocycle(spec, 0, negative), ConfigError);
}

TEST_CASE("schrodinger cocycle: transfer matrices") {
    const SubshiftSpec spec = SubshiftSpec::fibonacci();
    const LayeredSamplingFunction zero = LayeredSamplingFunction::constant(0.0, spec);

    const LocallyConstantCocycle at3 = schrodinger_cocycle(zero, spec, 3.0);
    CHECK(at3.eval("a").entrywise_distance(Mat2{3.0, -1.0, 1.0, 0.0}) == 0.0);

    const LayeredSamplingFunction ind = LayeredSamplingFunction::indicator('b', spec);
    const LocallyConstantCocycle at0 = schrodinger_cocycle(ind, spec, 0.0);
    CHECK(at0.eval("b").entrywise_distance(Mat2{-1.0, -1.0, 1.0, 0.0}) == 0.0);

    const LocallyConstantCocycle at2 = schrodinger_cocycle(zero, spec, 2.0);
    CHECK(at2.eval("a").a + at2.eval("a").d == doctest::Approx(2.0));  // parabolic trace

    for (const auto& [window, m] : at0.table()) CHECK(m.det() == 1.0);
}

TEST_CASE("iterate: identities and diagonal powers") {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const Word configuration = expand_prefix(spec, 64);

    const LocallyConstantCocycle identity =
        LocallyConstantCocycle::constant(spec, Mat2::identity());
    CHECK(iterate(identity, configuration, 0, 50).entrywise_distance(Mat2::identity()) == 0.0);
    CHECK(finite_scale_exponent(identity, configuration, 0, 50) == 0.0);

    // quarter rotation: A_4 = I exactly
    const LocallyConstantCocycle rotation = schrodinger_cocycle(
        LayeredSamplingFunction::constant(0.0, spec), spec, 0.0);
    CHECK(iterate(rotation, configuration, 0, 4).entrywise_distance(Mat2::identity()) <= 1e-12);

    const LocallyConstantCocycle diag =
        LocallyConstantCocycle::constant(spec, Mat2::diagonal(2.0, 0.5));
    CHECK(iterate(diag, configuration, 8, 5).entrywise_distance(Mat2::diagonal(32.0, 1.0 / 32.0)) <=
          1e-12);

    // A_0 = I and single inverse steps
    CHECK(iterate(diag, configuration, 8, 0).entrywise_distance(Mat2::identity()) == 0.0);
    CHECK(iterate(diag, configuration, 8, -3).entrywise_distance(
              Mat2::diagonal(1.0 / 8.0, 8.0)) <= 1e-12);

    CHECK_THROWS_AS(iterate(diag, configuration, 0, 100), InsufficientConfigurationError);
    CHECK_THROWS_AS(iterate(diag, configuration, 0, -1), InsufficientConfigurationError);
}

TEST_CASE("iterate: cocycle identity A_{n+m}(w) = A_n(T^m w) A_m(w)") {
    const SubshiftSpec spec = SubshiftSpec::fibonacci();
    const Word configuration = expand_prefix(spec, 512);
    std::mt19937_64 seeds(101);
    for (int trial = 0; trial < 20; ++trial) {
        const LocallyConstantCocycle cocycle = random_cocycle(spec, 1, seeds());
        std::mt19937_64 rng(seeds());
        std::uniform_int_distribution<int> pick(1, 64);
        const int n = pick(rng), m = pick(rng);
        const Mat2 lhs = iterate(cocycle, configuration, 8, n + m);
        const Mat2 rhs = iterate(cocycle, configuration, 8 + m, n) *
                         iterate(cocycle, configuration, 8, m);
        CHECK(lhs.entrywise_distance(rhs) <= 1e-9 * std::max(1.0, rhs.max_abs_entry()));
    }
}

TEST_CASE("iterate: negative products invert the positive ones") {
    const SubshiftSpec spec = SubshiftSpec::fibonacci();
    const Word configuration = expand_prefix(spec, 256);
    const LocallyConstantCocycle cocycle = random_cocycle(spec, 1, 4242);
    for (const int n : {1, 5, 17}) {
        // A_{-n}(T^n w) = (A_n(w))^{-1}
        const Mat2 forward = iterate(cocycle, configuration, 32, n);
        const Mat2 backward = iterate(cocycle, configuration, 32 + n, -n);
        CHECK((forward * backward).entrywise_distance(Mat2::identity()) <= 1e-9);
    }
}

TEST_CASE("iterate: determinant stays one on bounded-norm products") {
    // det = ad - bc drowns in rounding once the entries dwarf the unit
    // determinant, so the invariant is checked where it is checkable:
    // products whose norms stay moderate.
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const Word configuration = expand_prefix(spec, 5000);
    const LocallyConstantCocycle elliptic = schrodinger_cocycle(
        LayeredSamplingFunction::constant(0.0, spec), spec, 1.2345);
    for (const std::int64_t n : {64, 1024, 4096}) {
        const Mat2 product = iterate(elliptic, configuration, 0, n);
        CHECK(std::abs(product.det() - 1.0) <= static_cast<double>(n) * 1e-10);
    }

    // near-identity random cocycles stay bounded long enough as well
    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    const Word fib_configuration = expand_prefix(fib, 1024);
    std::mt19937_64 seeds(77);
    for (int trial = 0; trial < 5; ++trial) {
        std::mt19937_64 rng(seeds());
        std::uniform_real_distribution<double> unit(-0.05, 0.05);
        std::map<Word, Mat2> table;
        for (const Word& w : factor_set(fib, 3).words) {
            Mat2 m{1.0 + unit(rng), unit(rng), unit(rng), 1.0 + unit(rng)};
            table[w] = (1.0 / std::sqrt(m.det())) * m;
        }
        const LocallyConstantCocycle mild(fib, 1, std::move(table));
        for (const std::int64_t n : {64, 256}) {
            const Mat2 product = iterate(mild, fib_configuration, 2, n);
            CHECK(std::abs(product.det() - 1.0) <= static_cast<double>(n) * 1e-10);
        }
    }
}

TEST_CASE("finite_scale_exponent: closed forms") {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const Word configuration = expand_prefix(spec, 20'000);

    const LocallyConstantCocycle loxodromic = LocallyConstantCocycle::constant(
        spec, Mat2::diagonal(std::exp(1.0), std::exp(-1.0)));
    for (const std::int64_t n : {1, 10, 1000})
        CHECK(finite_scale_exponent(loxodromic, configuration, 0, n) ==
              doctest::Approx(1.0).epsilon(1e-12));

    // free transfer matrix at energy 3: exponent -> log((3 + sqrt 5) / 2)
    const LocallyConstantCocycle at3 = schrodinger_cocycle(
        LayeredSamplingFunction::constant(0.0, spec), spec, 3.0);
    const double oracle = std::log((3.0 + std::sqrt(5.0)) / 2.0);
    CHECK(finite_scale_exponent(at3, configuration, 0, 10'000) ==
          doctest::Approx(oracle).epsilon(1e-3));

    std::mt19937_64 seeds(13);
    for (int trial = 0; trial < 10; ++trial) {
        const LocallyConstantCocycle random =
            random_cocycle(SubshiftSpec::fibonacci(), 0, seeds());
        const Word fib = expand_prefix(SubshiftSpec::fibonacci(), 256);
        CHECK(finite_scale_exponent(random, fib, 0, 100) >= 0.0);
    }
}

TEST_CASE("sup_exponent_exact: against a naive re-implementation") {
    const SubshiftSpec spec = SubshiftSpec::fibonacci();
    const LayeredSamplingFunction ind = LayeredSamplingFunction::indicator('b', spec);
    const LocallyConstantCocycle cocycle = schrodinger_cocycle(ind, spec, 0.0);

    const std::int64_t n = 5;
    const ExponentExtrema extrema = sup_exponent_exact(cocycle, n);

    // naive oracle: plain products over the enumerated factor set
    const FactorLanguage lang = factor_set(spec, n);
    CHECK(lang.words.size() == 6);
    double naive_max = -1.0, naive_min = 1e9;
    for (const Word& w : lang.words) {
        Mat2 product = Mat2::identity();
        for (char c : w) product = cocycle.eval(Word(1, c)) * product;
        const double e = product.log_spectral_norm() / static_cast<double>(n);
        naive_max = std::max(naive_max, e);
        naive_min = std::min(naive_min, e);
    }
    CHECK(extrema.max_exp == doctest::Approx(naive_max).epsilon(1e-12));
    CHECK(extrema.min_exp == doctest::Approx(naive_min).epsilon(1e-12));

    const LocallyConstantCocycle identity = LocallyConstantCocycle::constant(
        SubshiftSpec::periodic("a"), Mat2::identity());
    const ExponentExtrema id_extrema = sup_exponent_exact(identity, 12);
    CHECK(id_extrema.max_exp == 0.0);
    CHECK(id_extrema.min_exp == 0.0);

    const LocallyConstantCocycle diag = LocallyConstantCocycle::constant(
        SubshiftSpec::periodic("a"), Mat2::diagonal(2.0, 0.5));
    CHECK(sup_exponent_exact(diag, 3).max_exp == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("exponent_profile: agrees with per-scale exact extrema") {
    const SubshiftSpec spec = SubshiftSpec::fibonacci();
    const LocallyConstantCocycle cocycle = random_cocycle(spec, 1, 2024);
    const std::vector<ExponentPair> profile = exponent_profile(cocycle, 24);
    for (const std::int64_t n : {1, 2, 7, 16, 24}) {
        const ExponentExtrema exact = sup_exponent_exact(cocycle, n);
        CHECK(profile[n - 1].max_exp == doctest::Approx(exact.max_exp).epsilon(1e-12));
        CHECK(profile[n - 1].min_exp == doctest::Approx(exact.min_exp).epsilon(1e-12));
    }
}

TEST_CASE("sup_exponent_exact: budget errors suggest the sampled fallback") {
    Budget tiny;
    tiny.enumeration_steps = 10;
    const LocallyConstantCocycle cocycle =
        random_cocycle(SubshiftSpec::fibonacci(), 1, 555);
    CHECK_THROWS_AS(sup_exponent_exact(cocycle, 64, tiny), BudgetError);
}

TEST_CASE("cocycle family: slices and materialization") {
    const SubshiftSpec spec = SubshiftSpec::fibonacci();
    const LayeredSamplingFunction ind = LayeredSamplingFunction::indicator('b', spec);
    const CocycleFamily family = CocycleFamily::schrodinger(ind, spec, -3.0, 3.0);

    const LocallyConstantCocycle slice = family.slice(1.5);
    CHECK(slice.eval("a").a == doctest::Approx(1.5));
    CHECK(slice.eval("b").a == doctest::Approx(0.5));

    const CocycleFamily rotation = CocycleFamily::rotation_test(spec, 0.0, 1.0);
    CHECK(rotation.eval(0.5, "a").entrywise_distance(Mat2::rotation(0.5)) == 0.0);

    const std::vector<Mat2> mats = family.materialize(2.0, {"a", "b"});
    CHECK(mats[0].a == doctest::Approx(2.0));
    CHECK(mats[1].a == doctest::Approx(1.0));
}

TEST_CASE("layered sampling functions: evaluation and bounds") {
    const SubshiftSpec spec = SubshiftSpec::fibonacci();
    SamplingLayer coarse;
    coarse.radius = 0;
    coarse.coefficient = 1.0;
    coarse.table = {{"a", 0.0}, {"b", 1.0}};
    SamplingLayer fine;
    fine.radius = 1;
    fine.coefficient = 0.25;
    for (const Word& w : factor_set(spec, 3).words) fine.table[w] = (w == "aba") ? 1.0 : 0.0;

    const LayeredSamplingFunction f({coarse, fine});
    CHECK(f.radius() == 1);
    CHECK(f.evaluate("aba") == doctest::Approx(1.25));  // center 'b' + window bonus
    CHECK(f.evaluate("aab") == doctest::Approx(0.0));
    CHECK(f.sup_norm_bound() == doctest::Approx(1.25));

    const auto [lo, hi] = f.range_on(spec);
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi == doctest::Approx(1.25));

    CHECK_THROWS_AS(f.evaluate("a"), ConfigError);
    CHECK_THROWS_AS(LayeredSamplingFunction({SamplingLayer{0, {{"ab", 1.0}}, 1.0}}),
                    ConfigError);
}
