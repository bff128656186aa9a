#include <doctest.h>

#include <cmath>

#include "cocyclelab/errors.hpp"
#include "cocyclelab/hyperbolicity.hpp"

using namespace cocyclelab;
using namespace cocyclelab::hyperbolicity;

namespace {

LocallyConstantCocycle free_cocycle(double energy) {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    return schrodinger_cocycle(LayeredSamplingFunction::constant(0.0, spec), spec, energy);
}

constexpr double kPi = 3.14159265358979323846;

double projective_gap(double x, double y) {
    double d = std::fmod(std::abs(x - y), kPi);
    return std::min(d, kPi - d);
}

}  // namespace

TEST_CASE("certify_uh: diagonal expansion certifies at block length one") {
    const LocallyConstantCocycle diag = LocallyConstantCocycle::constant(
        SubshiftSpec::periodic("a"), Mat2::diagonal(2.0, 0.5));
    const UhResult result = certify_uh(diag, 1, 1e-3);
    REQUIRE(result.certified());
    const UhCertificate& cert = *result.certificate;
    CHECK(cert.block_length == 1);
    CHECK(projective_gap(cert.cones.at("a").center, 0.0) <= 1e-9);  // horizontal axis
    CHECK(cert.exponent_lower_bound >= std::log(2.0) - 1e-4);
    CHECK(verify_uh_certificate(diag, cert));
}

TEST_CASE("certify_uh: elliptic rotations are refused at every block length") {
    const LocallyConstantCocycle rotation = free_cocycle(0.0);  // quarter turn
    for (const std::int64_t block : {1, 2, 3, 4, 8}) {
        const UhResult result = certify_uh(rotation, block, 1e-3);
        CHECK_FALSE(result.certified());
        CHECK(result.refusal->reason == "no-invariant-family");
    }
    const LocallyConstantCocycle generic_rotation = LocallyConstantCocycle::constant(
        SubshiftSpec::periodic("a"), Mat2::rotation(0.83));
    CHECK_FALSE(certify_uh(generic_rotation, 4, 1e-3).certified());
}

TEST_CASE("certify_uh: free hyperbolic point records the eigenvalue rate") {
    const UhResult result = certify_uh(free_cocycle(3.0), 1, 1e-3);
    REQUIRE(result.certified());
    const double rate = std::log((3.0 + std::sqrt(5.0)) / 2.0);
    CHECK(result.certificate->exponent_lower_bound >= 0.96 - 1e-2);
    CHECK(result.certificate->exponent_lower_bound <= rate + 1e-9);
    // cone sits on the expanding eigendirection (1, lambda^{-1} ... ) of [[3,-1],[1,0]]
    const double eigen_angle = std::atan2((3.0 - std::sqrt(5.0)) / 2.0, 1.0);
    CHECK(projective_gap(result.certificate->cones.at("a").center, eigen_angle) <= 1e-6);
    CHECK(verify_uh_certificate(free_cocycle(3.0), *result.certificate));
}

TEST_CASE("certify_uh: success implies exhaustive double-block expansion") {
    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    const LayeredSamplingFunction ind = LayeredSamplingFunction::indicator('b', fib);
    const LocallyConstantCocycle offspec = schrodinger_cocycle(ind, fib, 4.0);
    const std::int64_t block = 2;
    const UhResult result = certify_uh(offspec, block, 1e-3);
    REQUIRE(result.certified());
    const double required = (1.0 + result.certificate->margin) *
                            (1.0 + result.certificate->margin);
    for (const Word& w : factor_set(fib, 2 * block + 1).words) {
        const Mat2 product = iterate(offspec, w, 0, 2 * block);
        CHECK(product.spectral_norm() >= required);
    }
}

TEST_CASE("certify_uh: budget refusal is distinguished") {
    Budget tiny;
    tiny.enumeration_steps = 1;
    const UhResult result = certify_uh(free_cocycle(3.0), 4, 1e-3, tiny);
    CHECK_FALSE(result.certified());
    CHECK(result.refusal->reason == "budget");
}

TEST_CASE("extract_splitting: diagonal frame is exact") {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const LocallyConstantCocycle diag =
        LocallyConstantCocycle::constant(spec, Mat2::diagonal(2.0, 0.5));
    const Word configuration = expand_prefix(spec, 256);
    const SplittingSample sample = extract_splitting(diag, configuration, 10);
    REQUIRE(!sample.points.empty());
    for (const auto& p : sample.points) {
        CHECK(projective_gap(p.unstable_angle, 0.0) <= 1e-9);
        CHECK(projective_gap(p.stable_angle, kPi / 2.0) <= 1e-9);
        CHECK(p.equivariance_residual_unstable <= 1e-9);
        CHECK(p.equivariance_residual_stable <= 1e-9);
        CHECK(p.transversality_angle >= kAngleTol);
    }
    CHECK(sample.contraction_lambda == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("extract_splitting: eigen frames of the free cocycle at E = 3") {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const Word configuration = expand_prefix(spec, 512);
    const SplittingSample sample = extract_splitting(free_cocycle(3.0), configuration, 20);
    const double lambda = (3.0 + std::sqrt(5.0)) / 2.0;
    // eigenvectors of [[3,-1],[1,0]]: (1, 3 - lambda) for lambda, (1, 3 - 1/lambda) for 1/lambda
    const double u_angle = std::atan2(3.0 - lambda, 1.0);
    const double s_angle = std::atan2(3.0 - 1.0 / lambda, 1.0);
    for (const auto& p : sample.points) {
        CHECK(projective_gap(p.unstable_angle, u_angle) <= 1e-6);
        CHECK(projective_gap(p.stable_angle, s_angle) <= 1e-6);
    }
    CHECK(sample.contraction_lambda == doctest::Approx(lambda).epsilon(1e-4));
    CHECK(sample.max_equivariance_residual <= 1e-8);
}

TEST_CASE("extract_splitting: orthogonal products are degenerate") {
    const SubshiftSpec spec = SubshiftSpec::periodic("a");
    const Word configuration = expand_prefix(spec, 256);
    CHECK_THROWS_AS(extract_splitting(free_cocycle(0.0), configuration, 10),
                    DegenerateSingularValuesError);
}

TEST_CASE("extract_splitting: residuals shrink as the scale grows") {
    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    const LocallyConstantCocycle offspec = schrodinger_cocycle(
        LayeredSamplingFunction::indicator('b', fib), fib, 4.0);
    const Word configuration = expand_prefix(fib, 2048);
    const SplittingSample coarse = extract_splitting(offspec, configuration, 8);
    const SplittingSample fine = extract_splitting(offspec, configuration, 16);
    CHECK(fine.max_equivariance_residual <= 0.5 * coarse.max_equivariance_residual);
}

TEST_CASE("diagonal_cocycle: birkhoff-average identity is exact") {
    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    const LayeredSamplingFunction f = LayeredSamplingFunction::constant(1.0, fib) +
                                      LayeredSamplingFunction::indicator('b', fib);
    const LocallyConstantCocycle cocycle = diagonal_cocycle(f, fib);

    const Word configuration = expand_prefix(fib, 256);
    const std::int64_t n = 100;
    double birkhoff = 0.0;
    for (std::int64_t k = 0; k < n; ++k) birkhoff += f.evaluate(configuration.substr(k, 1));
    birkhoff /= static_cast<double>(n);

    const double exponent = finite_scale_exponent(cocycle, configuration, 0, n);
    CHECK(std::abs(exponent - birkhoff) <= static_cast<double>(n) * 1e-14);

    const LayeredSamplingFunction one = LayeredSamplingFunction::constant(1.0, fib);
    const LocallyConstantCocycle unit = diagonal_cocycle(one, fib);
    CHECK(unit.eval("a").a == doctest::Approx(std::exp(1.0)));
    CHECK(finite_scale_exponent(unit, configuration, 0, 64) ==
          doctest::Approx(1.0).epsilon(1e-12));

    const LayeredSamplingFunction small = LayeredSamplingFunction::constant(0.5, fib);
    CHECK_THROWS_AS(diagonal_cocycle(small, fib), ConfigError);
}

TEST_CASE("uh1_vs_uh3_probe: spreads shrink when uniquely ergodic, persist on the fixture") {
    const std::vector<std::int64_t> horizons{32, 64, 128, 256, 512};

    const LocallyConstantCocycle diag = LocallyConstantCocycle::constant(
        SubshiftSpec::fibonacci(), Mat2::diagonal(2.0, 0.5));
    const SpreadReport constant_report = uh1_vs_uh3_probe(diag, horizons);
    for (const auto& p : constant_report.trace) CHECK(p.spread() <= 1e-12);

    const SubshiftSpec fib = SubshiftSpec::fibonacci();
    const LocallyConstantCocycle offspec = schrodinger_cocycle(
        LayeredSamplingFunction::indicator('b', fib), fib, 4.0);
    const SpreadReport shrinking = uh1_vs_uh3_probe(offspec, horizons);
    CHECK(shrinking.spread_shrinks);
    CHECK(shrinking.last_spread < 0.5 * shrinking.first_spread);

    const SubshiftSpec fixture = SubshiftSpec::disjoint_union(
        {SubshiftSpec::periodic("a"), SubshiftSpec::periodic("b")});
    const LayeredSamplingFunction f = LayeredSamplingFunction::constant(1.0, fixture) +
                                      LayeredSamplingFunction::indicator('b', fixture);
    const SpreadReport split = uh1_vs_uh3_probe(diagonal_cocycle(f, fixture), horizons);
    CHECK_FALSE(split.spread_shrinks);
    for (const auto& p : split.trace) CHECK(p.spread() >= 0.9);
}
