#include "cocyclelab/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>

#include "cocyclelab/errors.hpp"

namespace cocyclelab::hyperbolicity {
namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_half_circle(double angle) {
    double a = std::fmod(angle, kPi);
    if (a < 0.0) a += kPi;
    return a;
}

// signed difference on the projective circle, in (-pi/2, pi/2]
double projective_diff(double from, double to) {
    double d = std::fmod(to - from, kPi);
    if (d > kPi / 2.0) d -= kPi;
    if (d <= -kPi / 2.0) d += kPi;
    return d;
}

double projective_dist(double x, double y) { return std::abs(projective_diff(x, y)); }

double direction_angle(double x, double y) { return wrap_half_circle(std::atan2(y, x)); }

double image_angle(const Mat2& m, double angle) {
    const auto v = m.apply(std::cos(angle), std::sin(angle));
    return direction_angle(v[0], v[1]);
}

// most expanded input direction (right singular frame) of m
double dominant_input_angle(const Mat2& m) {
    const double alpha = m.a * m.a + m.c * m.c;
    const double beta = m.b * m.b + m.d * m.d;
    const double gamma = m.a * m.b + m.c * m.d;
    return wrap_half_circle(0.5 * std::atan2(2.0 * gamma, alpha - beta));
}

bool cone_contains(const Cone& outer, double angle, double slack) {
    return projective_dist(outer.center, angle) <= outer.half_width + slack;
}

// image of a cone under the projective action; orientation is preserved
// (det > 0), so the image arc runs between the endpoint images
Cone image_cone(const Mat2& m, const Cone& cone) {
    const double lo = image_angle(m, cone.center - cone.half_width);
    const double hi = image_angle(m, cone.center + cone.half_width);
    double width = std::fmod(hi - lo, kPi);
    if (width < 0.0) width += kPi;
    return {wrap_half_circle(lo + width / 2.0), width / 2.0};
}

// smallest arc containing both; half_width >= pi/2 means the hull stopped
// being a proper cone
Cone merge_cones(const Cone& a, const Cone& b) {
    const double d = projective_diff(a.center, b.center);
    const double lo = std::min(-a.half_width, d - b.half_width);
    const double hi = std::max(a.half_width, d + b.half_width);
    return {wrap_half_circle(a.center + 0.5 * (lo + hi)), 0.5 * (hi - lo)};
}

// min over the cone of log ||B v(theta)|| for the scaled block B
double min_log_expansion_on_cone(const ScaledMat2& block, const Cone& cone) {
    const Mat2& m = block.matrix_part();
    const double alpha = m.a * m.a + m.c * m.c;
    const double beta = m.b * m.b + m.d * m.d;
    const double gamma = m.a * m.b + m.c * m.d;
    auto growth_sq = [&](double theta) {
        const double co = std::cos(theta), si = std::sin(theta);
        return alpha * co * co + 2.0 * gamma * co * si + beta * si * si;
    };
    double min_sq = std::min(growth_sq(cone.center - cone.half_width),
                             growth_sq(cone.center + cone.half_width));
    // interior critical directions of the quadratic form
    const double crit = 0.5 * std::atan2(2.0 * gamma, alpha - beta);
    for (double theta : {crit, crit + kPi / 2.0}) {
        if (projective_dist(wrap_half_circle(theta), cone.center) <= cone.half_width)
            min_sq = std::min(min_sq, growth_sq(theta));
    }
    return block.log_scale() + 0.5 * std::log(std::max(min_sq, 1e-300));
}

struct Block {
    std::int32_t source = 0;
    std::int32_t target = 0;
    ScaledMat2 product;
};

struct BlockSystem {
    std::vector<Word> windows;
    std::vector<Block> blocks;
};

BlockSystem build_blocks(const LocallyConstantCocycle& cocycle, std::int64_t block_length,
                         const Budget& budget) {
    const int r = cocycle.window_radius();
    const long wlen = cocycle.window_length();
    // a block word covers the source window, the N product steps and the
    // target window at position N
    const FactorLanguage words = factor_set(cocycle.spec(), block_length + 2L * r + 1, budget);
    const std::int64_t steps = static_cast<std::int64_t>(words.words.size()) * block_length;
    if (steps > budget.enumeration_steps)
        throw BudgetError("block enumeration needs " + std::to_string(steps) +
                          " steps, budget is " + std::to_string(budget.enumeration_steps));

    BlockSystem sys;
    const FactorLanguage windows = factor_set(cocycle.spec(), wlen, budget);
    sys.windows = windows.words;
    std::map<Word, std::int32_t> ids;
    for (std::size_t i = 0; i < sys.windows.size(); ++i)
        ids[sys.windows[i]] = static_cast<std::int32_t>(i);

    for (const Word& w : words.words) {
        Block blk;
        blk.source = ids.at(w.substr(0, wlen));
        blk.target = ids.at(w.substr(block_length, wlen));
        blk.product = iterate_scaled(cocycle, w, r, block_length);
        sys.blocks.push_back(std::move(blk));
    }
    return sys;
}

}  // namespace

UhResult certify_uh(const LocallyConstantCocycle& cocycle, std::int64_t block_length,
                    double margin, const Budget& budget) {
    if (block_length < 1) throw ConfigError("block length must be >= 1");
    if (!(margin > 0.0)) throw ConfigError("margin must be > 0");

    BlockSystem sys;
    try {
        sys = build_blocks(cocycle, block_length, budget);
    } catch (const BudgetError& e) {
        return {std::nullopt, UhRefusal{"budget", e.what()}};
    }

    std::vector<Cone> cones(sys.windows.size());
    for (const Block& blk : sys.blocks)
        cones[blk.source] = {dominant_input_angle(blk.product.matrix_part()), kPi / 8.0};

    // graph-transform sweeps: replace each cone by the hull of its incoming
    // images until the family stabilizes (hyperbolic blocks contract it onto
    // the unstable-direction spread; elliptic ones wander or blow up)
    for (int sweep = 0; sweep < 64; ++sweep) {
        std::vector<Cone> next(cones.size(), Cone{0.0, -1.0});
        for (const Block& blk : sys.blocks) {
            const Cone img = image_cone(blk.product.matrix_part(), cones[blk.source]);
            Cone& tgt = next[blk.target];
            tgt = (tgt.half_width < 0.0) ? img : merge_cones(tgt, img);
        }
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            if (next[i].half_width < 0.0) next[i] = cones[i];
            if (next[i].half_width >= kPi / 2.0)
                return {std::nullopt,
                        UhRefusal{"no-invariant-family",
                                  "cone hull reached a half circle at block length " +
                                      std::to_string(block_length) + "; try a larger block"}};
            change = std::max(change, projective_dist(next[i].center, cones[i].center) +
                                          std::abs(next[i].half_width - cones[i].half_width));
        }
        cones = std::move(next);
        if (change < 1e-12) break;
    }

    // pad the converged family until strict invariance holds with the
    // requested angular margin; weak hyperbolicity needs wider cones
    const double log_required = std::log1p(margin);
    for (double pad = margin; pad <= kPi / 3.0; pad *= 2.0) {
        std::vector<Cone> padded = cones;
        bool proper = true;
        for (Cone& cone : padded) {
            cone.half_width += pad;
            proper = proper && cone.half_width < kPi / 2.0;
        }
        if (!proper) break;

        bool invariant = true;
        double min_log_expansion = std::numeric_limits<double>::infinity();
        double min_angular_margin = std::numeric_limits<double>::infinity();
        for (const Block& blk : sys.blocks) {
            const Cone img = image_cone(blk.product.matrix_part(), padded[blk.source]);
            const Cone& tgt = padded[blk.target];
            const double angular_margin =
                tgt.half_width - (projective_dist(tgt.center, img.center) + img.half_width);
            const double log_exp = min_log_expansion_on_cone(blk.product, padded[blk.source]);
            min_angular_margin = std::min(min_angular_margin, angular_margin);
            min_log_expansion = std::min(min_log_expansion, log_exp);
            if (angular_margin < margin || log_exp < log_required) {
                invariant = false;
                break;
            }
        }
        if (invariant) {
            UhCertificate cert;
            cert.block_length = block_length;
            cert.margin = margin;
            cert.min_expansion = std::exp(min_log_expansion);
            cert.exponent_lower_bound = min_log_expansion / static_cast<double>(block_length);
            cert.min_angular_margin = min_angular_margin;
            for (std::size_t i = 0; i < sys.windows.size(); ++i)
                cert.cones[sys.windows[i]] = padded[i];
            return {cert, std::nullopt};
        }
    }
    return {std::nullopt,
            UhRefusal{"no-invariant-family",
                      "no strictly invariant cone family at block length " +
                          std::to_string(block_length) + "; try a larger block"}};
}

bool verify_uh_certificate(const LocallyConstantCocycle& cocycle, const UhCertificate& cert,
                           const Budget& budget) {
    const BlockSystem sys = build_blocks(cocycle, cert.block_length, budget);
    const double log_required = std::log1p(cert.margin);
    for (const Block& blk : sys.blocks) {
        auto src = cert.cones.find(sys.windows[blk.source]);
        auto tgt = cert.cones.find(sys.windows[blk.target]);
        if (src == cert.cones.end() || tgt == cert.cones.end()) return false;
        const Cone img = image_cone(blk.product.matrix_part(), src->second);
        const double angular_margin =
            tgt->second.half_width -
            (projective_dist(tgt->second.center, img.center) + img.half_width);
        if (angular_margin < cert.margin) return false;
        if (min_log_expansion_on_cone(blk.product, src->second) < log_required) return false;
    }
    return true;
}

namespace {

struct Frame {
    double contracted_angle = 0.0;
    double relative_gap = 0.0;
};

Frame contracted_frame(const ScaledMat2& product) {
    const Mat2& m = product.matrix_part();
    const double s1_sq = m.spectral_norm_sq();
    const double det = m.det();
    const double gap = 1.0 - (det * det) / (s1_sq * s1_sq);  // 1 - (s2/s1)^2
    Frame f;
    f.relative_gap = gap;
    f.contracted_angle = wrap_half_circle(dominant_input_angle(m) + kPi / 2.0);
    return f;
}

}  // namespace

SplittingSample extract_splitting(const LocallyConstantCocycle& cocycle,
                                  const Word& configuration, std::int64_t n, int max_samples) {
    if (n < 2) throw ConfigError("splitting extraction needs n >= 2");
    const int r = cocycle.window_radius();
    const std::int64_t first = n + r;
    const std::int64_t last = static_cast<std::int64_t>(configuration.size()) - n - r - 2;
    if (last < first) throw InsufficientConfigurationError(2 * (n + r) + 2, configuration.size());

    SplittingSample sample;
    sample.min_singular_gap = std::numeric_limits<double>::infinity();
    const std::int64_t count = std::min<std::int64_t>(max_samples, last - first + 1);
    const std::int64_t stride = std::max<std::int64_t>(1, (last - first + 1) / count);

    auto directions_at = [&](std::int64_t pos) {
        const ScaledMat2 forward = iterate_scaled(cocycle, configuration, pos, n);
        const ScaledMat2 backward = iterate_scaled(cocycle, configuration, pos, -n);
        const Frame fwd = contracted_frame(forward);
        const Frame bwd = contracted_frame(backward);
        const double gap = std::min(fwd.relative_gap, bwd.relative_gap);
        if (gap < kGapTol) throw DegenerateSingularValuesError(gap);
        sample.min_singular_gap = std::min(sample.min_singular_gap, gap);
        return std::pair<double, double>{bwd.contracted_angle, fwd.contracted_angle};  // (u, s)
    };

    for (std::int64_t i = 0; i < count; ++i) {
        const std::int64_t pos = first + i * stride;
        const auto [u_here, s_here] = directions_at(pos);
        const auto [u_next, s_next] = directions_at(pos + 1);
        const Mat2& step = cocycle.eval(configuration.substr(pos - r, cocycle.window_length()));

        SplittingPoint pt;
        pt.position = pos;
        pt.unstable_angle = u_here;
        pt.stable_angle = s_here;
        pt.equivariance_residual_unstable = projective_dist(image_angle(step, u_here), u_next);
        pt.equivariance_residual_stable = projective_dist(image_angle(step, s_here), s_next);
        pt.transversality_angle = projective_dist(u_here, s_here);
        sample.max_equivariance_residual =
            std::max({sample.max_equivariance_residual, pt.equivariance_residual_unstable,
                      pt.equivariance_residual_stable});
        sample.points.push_back(pt);
    }

    // decay fit of the contracted direction at the first sample:
    // log ||A_k S|| ~ log C - k log lambda over k <= n/2
    const SplittingPoint& base = sample.points.front();
    double vx = std::cos(base.stable_angle), vy = std::sin(base.stable_angle);
    double log_norm = 0.0;
    const std::int64_t fit_n = std::max<std::int64_t>(2, n / 2);
    std::vector<double> ys(fit_n);
    for (std::int64_t k = 1; k <= fit_n; ++k) {
        const auto w = cocycle.eval(configuration.substr(base.position + (k - 1) - r,
                                                         cocycle.window_length()))
                           .apply(vx, vy);
        const double len = std::hypot(w[0], w[1]);
        log_norm += std::log(len);
        vx = w[0] / len;
        vy = w[1] / len;
        ys[k - 1] = log_norm;
    }
    double k_mean = 0.0, y_mean = 0.0;
    for (std::int64_t k = 1; k <= fit_n; ++k) {
        k_mean += static_cast<double>(k);
        y_mean += ys[k - 1];
    }
    k_mean /= static_cast<double>(fit_n);
    y_mean /= static_cast<double>(fit_n);
    double num = 0.0, den = 0.0;
    for (std::int64_t k = 1; k <= fit_n; ++k) {
        num += (static_cast<double>(k) - k_mean) * (ys[k - 1] - y_mean);
        den += (static_cast<double>(k) - k_mean) * (static_cast<double>(k) - k_mean);
    }
    const double slope = num / den;
    sample.contraction_lambda = std::exp(-slope);
    sample.contraction_C = std::exp(y_mean - slope * k_mean);
    return sample;
}

LocallyConstantCocycle diagonal_cocycle(const LayeredSamplingFunction& f,
                                        const SubshiftSpec& spec, const Budget& budget) {
    if (f.tail() != 0.0)
        throw ConfigError("diagonal cocycle needs a finite-layered sampling function");
    const FactorLanguage lang = factor_set(spec, 2L * f.radius() + 1, budget);
    std::map<Word, Mat2> table;
    for (const Word& w : lang.words) {
        const double value = f.evaluate(w);
        if (value < 1.0)
            throw ConfigError("diagonal cocycle needs f >= 1; window \"" + w + "\" has " +
                              std::to_string(value));
        const double h = std::exp(value);
        table[w] = Mat2::diagonal(h, 1.0 / h);
    }
    return LocallyConstantCocycle(spec, f.radius(), std::move(table),
                                  LocallyConstantCocycle::kDefaultDetTol, budget);
}

SpreadReport uh1_vs_uh3_probe(const LocallyConstantCocycle& cocycle,
                              const std::vector<std::int64_t>& horizons, const Budget& budget) {
    if (horizons.empty()) throw ConfigError("horizons must be nonempty");
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (horizons[i] <= horizons[i - 1]) throw ConfigError("horizons must be ascending");

    const std::vector<ExponentPair> profile = exponent_profile(cocycle, horizons.back(), budget);
    SpreadReport report;
    for (std::int64_t n : horizons) {
        const ExponentPair& p = profile[n - 1];
        report.trace.push_back({n, p.max_exp, p.min_exp});
    }
    report.first_spread = report.trace.front().spread();
    report.last_spread = report.trace.back().spread();
    report.spread_shrinks = report.last_spread < 0.5 * report.first_spread;
    return report;
}

}  // namespace cocyclelab::hyperbolicity
