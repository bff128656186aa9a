#include "cocyclelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cocyclelab/errors.hpp"
#include "parallel.hpp"

namespace cocyclelab::spectrum {

std::vector<double> EnergyGrid::points() const {
    if (!(e_min < e_max)) throw ConfigError("energy grid needs e_min < e_max");
    if (!(step > 0.0)) throw ConfigError("energy grid needs step > 0");
    const std::int64_t count =
        static_cast<std::int64_t>(std::floor((e_max - e_min) / step + 0.5)) + 1;
    std::vector<double> pts(count);
    for (std::int64_t i = 0; i < count; ++i) pts[i] = e_min + static_cast<double>(i) * step;
    return pts;
}

double BandSet::measure() const { return spectrum_measure(bands); }

double discriminant(const std::vector<double>& values, double energy) {
    Mat2 product = Mat2::identity();
    for (double v : values) product = Mat2::transfer(energy - v) * product;
    return product.a + product.d;
}

namespace {

double bisect_discriminant(const std::vector<double>& values, double target, double lo,
                           double hi) {
    // secant-free bisection on D(E) - target, refined to 1e-10
    double flo = discriminant(values, lo) - target;
    for (int iter = 0; iter < 80 && hi - lo > 1e-10; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = discriminant(values, mid) - target;
        if ((flo <= 0.0) == (fmid <= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

BandSet periodic_spectrum(const std::vector<double>& values, double resolution) {
    if (values.empty()) throw ConfigError("periodic potential must be nonempty");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("potential values must be finite");

    const auto [vmin_it, vmax_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *vmin_it - 2.0 - 1e-9;
    const double hi = *vmax_it + 2.0 + 1e-9;
    if (resolution <= 0.0) resolution = (hi - lo) / (100.0 * static_cast<double>(values.size()));

    const std::int64_t cells =
        std::max<std::int64_t>(8, static_cast<std::int64_t>(std::ceil((hi - lo) / resolution)));
    const double step = (hi - lo) / static_cast<double>(cells);

    // scan |D| <= 2 on the grid; refine every run boundary on the branch of
    // D -+ 2 that changes sign there
    std::vector<double> disc(cells + 1);
    for (std::int64_t i = 0; i <= cells; ++i)
        disc[i] = discriminant(values, lo + static_cast<double>(i) * step);

    BandSet out;
    std::int64_t i = 0;
    while (i <= cells) {
        if (std::abs(disc[i]) > 2.0) {
            ++i;
            continue;
        }
        const std::int64_t run_start = i;
        while (i + 1 <= cells && std::abs(disc[i + 1]) <= 2.0) ++i;
        const std::int64_t run_end = i;

        double band_lo = lo + static_cast<double>(run_start) * step;
        double band_hi = lo + static_cast<double>(run_end) * step;
        if (run_start > 0) {
            const double target = disc[run_start - 1] > 2.0 ? 2.0 : -2.0;
            band_lo = bisect_discriminant(values, target, band_lo - step, band_lo);
        }
        if (run_end < cells) {
            const double target = disc[run_end + 1] > 2.0 ? 2.0 : -2.0;
            band_hi = bisect_discriminant(values, target, band_hi, band_hi + step);
        }
        out.bands.push_back({band_lo, band_hi});
        ++i;
    }
    return out;
}

double spectrum_measure(const std::vector<Interval>& intervals) {
    double total = 0.0;
    for (const Interval& iv : intervals) total += iv.length();
    return total;
}

double covering_bound(const std::vector<Interval>& intervals, double eps, std::int64_t m) {
    if (eps < 0.0) throw ConfigError("covering bound needs eps >= 0");
    return 2.0 * static_cast<double>(m) * eps + spectrum_measure(intervals);
}

std::string to_string(EnergyVerdictClass cls) {
    switch (cls) {
        case EnergyVerdictClass::Resolvent: return "resolvent";
        case EnergyVerdictClass::CandidateSmallExponent: return "candidate-small-exponent";
        case EnergyVerdictClass::CandidateUnresolved: return "candidate-unresolved";
    }
    return "candidate-unresolved";
}

SpectrumEstimate scan_spectrum(const LayeredSamplingFunction& f, const SubshiftSpec& spec,
                               const EnergyGrid& grid, const ScanParams& params,
                               const Budget& budget) {
    const std::vector<double> energies = grid.points();
    const CompiledEnsemble ensemble =
        compile_ensemble(spec, f.radius(), params.horizon, budget);
    const CocycleFamily family =
        CocycleFamily::schrodinger(f, spec, grid.e_min, grid.e_max);

    SpectrumEstimate estimate;
    estimate.grid = grid;
    estimate.params = params;
    estimate.energies.resize(energies.size());

    detail::parallel_for(energies.size(), params.threads, [&](std::size_t i) {
        EnergyVerdict& verdict = estimate.energies[i];
        verdict.energy = energies[i];
        try {
            const std::vector<ExponentPair> profile =
                exponent_profile_compiled(ensemble, family.materialize(energies[i],
                                                                       ensemble.windows));
            verdict.exponent_at_horizon = profile.back().max_exp;

            const LocallyConstantCocycle slice = family.slice(energies[i], budget);
            for (std::int64_t block = 1; block <= params.uh_block_max; block *= 2) {
                hyperbolicity::UhResult uh =
                    hyperbolicity::certify_uh(slice, block, params.uh_margin, budget);
                if (uh.certified()) {
                    verdict.cls = EnergyVerdictClass::Resolvent;
                    verdict.certificate = std::move(uh.certificate);
                    return;
                }
            }
            for (std::int64_t N = 1; 2 * N <= params.horizon; ++N) {
                bool ok = true;
                for (std::int64_t k = N; k <= 2 * N && ok; ++k)
                    ok = profile[k - 1].max_exp < params.epsilon;
                if (ok) {
                    verdict.cls = EnergyVerdictClass::CandidateSmallExponent;
                    verdict.small_exponent_from = N;
                    return;
                }
            }
            verdict.cls = EnergyVerdictClass::CandidateUnresolved;
        } catch (const BudgetError&) {
            verdict.cls = EnergyVerdictClass::CandidateUnresolved;
            verdict.budget_degraded = true;
        }
    });

    // candidate runs, padded one grid step, merged when overlapping
    for (std::size_t i = 0; i < estimate.energies.size(); ++i) {
        if (estimate.energies[i].cls == EnergyVerdictClass::Resolvent) continue;
        std::size_t j = i;
        while (j + 1 < estimate.energies.size() &&
               estimate.energies[j + 1].cls != EnergyVerdictClass::Resolvent)
            ++j;
        const double lo = estimate.energies[i].energy - grid.step;
        const double hi = estimate.energies[j].energy + grid.step;
        if (!estimate.candidate_intervals.empty() &&
            lo <= estimate.candidate_intervals.back().hi) {
            estimate.candidate_intervals.back().hi = hi;
        } else {
            estimate.candidate_intervals.push_back({lo, hi});
        }
        i = j;
    }
    estimate.measure = spectrum_measure(estimate.candidate_intervals);
    return estimate;
}

std::vector<std::int64_t> approximant_periods(const SubshiftSpec& spec, int max_level,
                                              const Budget& budget) {
    if (max_level < 1) throw ConfigError("approximant level must be >= 1");
    std::vector<std::int64_t> periods;
    if (const auto* p = std::get_if<SubshiftSpec::Periodic>(&spec.variant())) {
        for (int k = 1; k <= max_level; ++k)
            periods.push_back(static_cast<std::int64_t>(k) * p->word.size());
    } else if (const auto* s = std::get_if<SubshiftSpec::Substitution>(&spec.variant())) {
        Word w(1, s->seed);
        for (int k = 1; k <= max_level; ++k) {
            Word next;
            for (char c : w) next += s->rules.at(c);
            w = std::move(next);
            periods.push_back(static_cast<std::int64_t>(w.size()));
            if (static_cast<std::int64_t>(w.size()) > budget.max_prefix_length)
                throw BudgetError("approximant period exceeds prefix budget");
        }
    } else if (const auto* st = std::get_if<SubshiftSpec::Sturmian>(&spec.variant())) {
        std::int64_t q_prev = 0, q_cur = 1;
        for (int k = 0; k < max_level; ++k) {
            if (k >= static_cast<int>(st->continued_fraction.size()))
                throw ConfigError("continued fraction too short for level " +
                                  std::to_string(k + 1));
            const std::int64_t q_next = st->continued_fraction[k] * q_cur + q_prev;
            q_prev = q_cur;
            q_cur = q_next;
            periods.push_back(q_cur);
        }
    } else if (const auto* t = std::get_if<SubshiftSpec::SimpleToeplitz>(&spec.variant())) {
        std::int64_t q = 1;
        for (int k = 0; k < max_level; ++k) {
            q *= t->periods[k % t->periods.size()];
            periods.push_back(q);
            if (q > budget.max_prefix_length)
                throw BudgetError("approximant period exceeds prefix budget");
        }
    } else {
        throw ConfigError("approximant sequences need a single-component subshift");
    }
    return periods;
}

std::vector<ApproximantLevel> approximant_sequence(const LayeredSamplingFunction& f,
                                                   const SubshiftSpec& spec, int max_level,
                                                   double resolution, const Budget& budget) {
    if (f.tail() != 0.0)
        throw ConfigError("approximants need a finite-layered sampling function");
    const std::vector<std::int64_t> periods = approximant_periods(spec, max_level, budget);
    const int r = f.radius();

    std::vector<ApproximantLevel> out;
    for (int k = 0; k < max_level; ++k) {
        const std::int64_t q = periods[k];
        const Word prefix = expand_prefix(spec, q + 2L * r, budget);
        std::vector<double> potential(q);
        for (std::int64_t j = 0; j < q; ++j)
            potential[j] = f.evaluate(prefix.substr(j, 2L * r + 1));
        ApproximantLevel level;
        level.level = k + 1;
        level.period = q;
        level.bands = periodic_spectrum(potential, resolution);
        level.measure = level.bands.measure();
        out.push_back(std::move(level));
    }
    return out;
}

namespace {

// max over points of `from` of the distance to the interval set `to`
// (attained at endpoints or at gap midpoints)
double max_distance_to_set(const std::vector<Interval>& from, const std::vector<Interval>& to) {
    if (from.empty()) return 0.0;
    if (to.empty()) return std::numeric_limits<double>::infinity();
    auto dist = [&](double x) {
        double best = std::numeric_limits<double>::infinity();
        for (const Interval& iv : to) {
            if (x < iv.lo)
                best = std::min(best, iv.lo - x);
            else if (x > iv.hi)
                best = std::min(best, x - iv.hi);
            else
                return 0.0;
        }
        return best;
    };
    double worst = 0.0;
    for (const Interval& g : from) {
        worst = std::max(worst, std::max(dist(g.lo), dist(g.hi)));
        // interior maxima sit at midpoints between consecutive target bands
        for (std::size_t i = 0; i + 1 < to.size(); ++i) {
            const double mid = 0.5 * (to[i].hi + to[i + 1].lo);
            if (mid > g.lo && mid < g.hi) worst = std::max(worst, dist(mid));
        }
    }
    return worst;
}

}  // namespace

SemicontinuityReport semicontinuity_probe(const LayeredSamplingFunction& f,
                                          const LayeredSamplingFunction& g,
                                          const SubshiftSpec& spec, int level, double resolution,
                                          const Budget& budget) {
    if (f.tail() != 0.0 || g.tail() != 0.0)
        throw ConfigError("semicontinuity probe needs finite-layered sampling functions");

    // ||f - g||_inf over legal windows at the joint radius
    const int radius = std::max(f.radius(), g.radius());
    const FactorLanguage lang = factor_set(spec, 2L * radius + 1, budget);
    double eps = 0.0;
    for (const Word& w : lang.words) {
        const Word wf = w.substr(radius - f.radius(), 2L * f.radius() + 1);
        const Word wg = w.substr(radius - g.radius(), 2L * g.radius() + 1);
        eps = std::max(eps, std::abs(f.evaluate(wf) - g.evaluate(wg)));
    }

    SemicontinuityReport report;
    report.epsilon = eps;
    report.f_bands = approximant_sequence(f, spec, level, resolution, budget).back().bands;
    report.g_bands = approximant_sequence(g, spec, level, resolution, budget).back().bands;
    report.max_distance = max_distance_to_set(report.g_bands.bands, report.f_bands.bands);
    report.violation = std::max(0.0, report.max_distance - eps);
    report.inside = report.violation <= 1e-8;
    return report;
}

}  // namespace cocyclelab::spectrum
