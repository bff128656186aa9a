#include "cocyclelab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cocyclelab/errors.hpp"

namespace cocyclelab {

LocallyConstantCocycle::LocallyConstantCocycle(SubshiftSpec spec, int window_radius,
                                               std::map<Word, Mat2> table, double det_tol,
                                               const Budget& budget)
    : spec_(std::move(spec)), radius_(window_radius), table_(std::move(table)) {
    if (radius_ < 0) throw ConfigError("window radius must be >= 0");
    const FactorLanguage lang = factor_set(spec_, 2L * radius_ + 1, budget);
    for (const Word& w : lang.words)
        if (table_.find(w) == table_.end())
            throw ConfigError("cocycle table misses legal window \"" + w + "\"");
    for (auto& [window, m] : table_) {
        const double det = m.det();
        if (!(det > 0.0))
            throw ConfigError("cocycle entry at \"" + window + "\" has determinant " +
                              std::to_string(det));
        if (std::abs(det - 1.0) > det_tol) {
            m = (1.0 / std::sqrt(det)) * m;
            warnings_.push_back("entry at \"" + window + "\" renormalized from det " +
                                std::to_string(det));
        }
    }
}

LocallyConstantCocycle LocallyConstantCocycle::constant(SubshiftSpec spec, const Mat2& m,
                                                        const Budget& budget) {
    std::map<Word, Mat2> table;
    for (char c : spec.alphabet()) table[Word(1, c)] = m;
    return LocallyConstantCocycle(std::move(spec), 0, std::move(table), kDefaultDetTol, budget);
}

const Mat2& LocallyConstantCocycle::eval(const Word& window) const {
    auto it = table_.find(window);
    if (it == table_.end()) throw IllegalWindowError(window);
    return it->second;
}

double LocallyConstantCocycle::max_step_log_norm() const {
    double c = 0.0;
    for (const auto& [window, m] : table_) c = std::max(c, m.log_spectral_norm());
    return c;
}

LocallyConstantCocycle schrodinger_cocycle(const LayeredSamplingFunction& f,
                                           const SubshiftSpec& spec, double energy,
                                           const Budget& budget) {
    if (f.tail() != 0.0)
        throw ConfigError("schrodinger cocycle needs a finite-layered sampling function; "
                          "discretize first (tail bound " + std::to_string(f.tail()) + ")");
    const int radius = f.radius();
    const FactorLanguage lang = factor_set(spec, 2L * radius + 1, budget);
    std::map<Word, Mat2> table;
    for (const Word& w : lang.words) table[w] = Mat2::transfer(energy - f.evaluate(w));
    return LocallyConstantCocycle(spec, radius, std::move(table),
                                  LocallyConstantCocycle::kDefaultDetTol, budget);
}

namespace {

// Bounds check for a product touching logical positions [start + lo, start + hi]
// with window radius r inside `configuration`.
void require_span(const Word& configuration, std::int64_t start, std::int64_t lo, std::int64_t hi,
                  int radius) {
    const std::int64_t first = start + lo - radius;
    const std::int64_t last = start + hi + radius;
    if (first < 0 || last >= static_cast<std::int64_t>(configuration.size()))
        throw InsufficientConfigurationError(last + 1, configuration.size());
}

}  // namespace

ScaledMat2 iterate_scaled(const LocallyConstantCocycle& cocycle, const Word& configuration,
                          std::int64_t start, std::int64_t n) {
    const int r = cocycle.window_radius();
    const long wlen = cocycle.window_length();
    ScaledMat2 product;
    if (n >= 0) {
        if (n > 0) require_span(configuration, start, 0, n - 1, r);
        for (std::int64_t j = 0; j < n; ++j)
            product.multiply_left(cocycle.eval(configuration.substr(start + j - r, wlen)));
    } else {
        // A_{-m}(omega) = A(T^{-m} omega)^{-1} ... A(T^{-1} omega)^{-1};
        // single factors are inverted exactly via the adjugate.
        const std::int64_t m = -n;
        require_span(configuration, start, -m, -1, r);
        for (std::int64_t j = 1; j <= m; ++j)
            product.multiply_left(
                cocycle.eval(configuration.substr(start - j - r, wlen)).inverse_unimodular());
    }
    return product;
}

Mat2 iterate(const LocallyConstantCocycle& cocycle, const Word& configuration, std::int64_t start,
             std::int64_t n) {
    return iterate_scaled(cocycle, configuration, start, n).to_mat2();
}

double finite_scale_exponent(const LocallyConstantCocycle& cocycle, const Word& configuration,
                             std::int64_t start, std::int64_t n) {
    if (n < 1) throw ConfigError("exponent scale n must be >= 1");
    const ScaledMat2 product = iterate_scaled(cocycle, configuration, start, n);
    return std::max(0.0, product.log_norm() / static_cast<double>(n));
}

CompiledEnsemble compile_ensemble(const SubshiftSpec& spec, int radius, std::int64_t n,
                                  const Budget& budget) {
    if (n < 1) throw ConfigError("product length must be >= 1");
    const long wlen = 2L * radius + 1;
    const FactorLanguage lang = factor_set(spec, n + 2L * radius, budget);
    const std::int64_t steps = static_cast<std::int64_t>(lang.words.size()) * n;
    if (steps > budget.enumeration_steps)
        throw BudgetError("exact enumeration needs " + std::to_string(steps) +
                          " steps, budget is " + std::to_string(budget.enumeration_steps) +
                          "; use a sampled orbit instead");

    CompiledEnsemble out{spec, radius, n, {}, {}, lang.exact};
    const FactorLanguage windows = factor_set(spec, wlen, budget);
    out.windows = windows.words;
    std::map<Word, std::int32_t> ids;
    for (std::size_t i = 0; i < out.windows.size(); ++i)
        ids[out.windows[i]] = static_cast<std::int32_t>(i);

    out.factors.reserve(lang.words.size());
    for (const Word& w : lang.words) {
        std::vector<std::int32_t> seq(n);
        for (std::int64_t j = 0; j < n; ++j) {
            auto it = ids.find(w.substr(j, wlen));
            if (it == ids.end()) throw IllegalWindowError(w.substr(j, wlen));
            seq[j] = it->second;
        }
        out.factors.push_back(std::move(seq));
    }
    return out;
}

std::vector<ExponentPair> exponent_profile_compiled(const CompiledEnsemble& ensemble,
                                                    const std::vector<Mat2>& window_mats) {
    std::vector<ExponentPair> out(ensemble.n);
    bool first = true;
    for (const auto& seq : ensemble.factors) {
        ScaledMat2 product;
        for (std::int64_t k = 0; k < ensemble.n; ++k) {
            product.multiply_left(window_mats[seq[k]]);
            const double e =
                std::max(0.0, product.log_norm() / static_cast<double>(k + 1));
            if (first) {
                out[k] = {e, e};
            } else {
                out[k].max_exp = std::max(out[k].max_exp, e);
                out[k].min_exp = std::min(out[k].min_exp, e);
            }
        }
        first = false;
    }
    return out;
}

std::vector<ExponentPair> exponent_profile(const LocallyConstantCocycle& cocycle,
                                           std::int64_t n_max, const Budget& budget) {
    const CompiledEnsemble ensemble = compile_ensemble(cocycle.spec(), cocycle.window_radius(),
                                                       n_max, budget);
    std::vector<Mat2> mats;
    mats.reserve(ensemble.windows.size());
    for (const Word& w : ensemble.windows) mats.push_back(cocycle.eval(w));
    return exponent_profile_compiled(ensemble, mats);
}

ExponentExtrema sup_exponent_exact(const LocallyConstantCocycle& cocycle, std::int64_t n,
                                   const Budget& budget) {
    if (n < 1) throw ConfigError("exponent scale n must be >= 1");
    const int r = cocycle.window_radius();
    const FactorLanguage lang = factor_set(cocycle.spec(), n + 2L * r, budget);
    const std::int64_t steps = static_cast<std::int64_t>(lang.words.size()) * n;
    if (steps > budget.enumeration_steps)
        throw BudgetError("exact enumeration needs " + std::to_string(steps) +
                          " steps, budget is " + std::to_string(budget.enumeration_steps) +
                          "; use a sampled orbit instead");

    ExponentExtrema out;
    bool first = true;
    for (const Word& w : lang.words) {
        const ScaledMat2 product = iterate_scaled(cocycle, w, r, n);
        const double e = std::max(0.0, product.log_norm() / static_cast<double>(n));
        if (first || e > out.max_exp) {
            out.max_exp = e;
            out.argmax = w;
        }
        if (first || e < out.min_exp) {
            out.min_exp = e;
            out.argmin = w;
        }
        first = false;
    }
    return out;
}

CocycleFamily::CocycleFamily(SubshiftSpec spec, int radius, double e_min, double e_max,
                             EvalFn eval, std::string kind)
    : spec_(std::move(spec)),
      radius_(radius),
      e_min_(e_min),
      e_max_(e_max),
      eval_(std::move(eval)),
      kind_(std::move(kind)) {
    if (!(e_min_ <= e_max_)) throw ConfigError("energy interval is empty");
}

CocycleFamily CocycleFamily::schrodinger(const LayeredSamplingFunction& f, SubshiftSpec spec,
                                         double e_min, double e_max) {
    if (f.tail() != 0.0)
        throw ConfigError("schrodinger family needs a finite-layered sampling function");
    return CocycleFamily(
        spec, f.radius(), e_min, e_max,
        [f](double energy, const Word& window) {
            return Mat2::transfer(energy - f.evaluate(window));
        },
        "schrodinger");
}

CocycleFamily CocycleFamily::rotation_test(SubshiftSpec spec, double e_min, double e_max) {
    return CocycleFamily(
        spec, 0, e_min, e_max,
        [](double energy, const Word&) { return Mat2::rotation(energy); }, "rotation-test");
}

CocycleFamily CocycleFamily::constant_in_energy(LocallyConstantCocycle cocycle, double e_min,
                                                double e_max) {
    auto shared = std::make_shared<LocallyConstantCocycle>(std::move(cocycle));
    return CocycleFamily(
        shared->spec(), shared->window_radius(), e_min, e_max,
        [shared](double, const Word& window) { return shared->eval(window); },
        "energy-constant");
}

LocallyConstantCocycle CocycleFamily::slice(double energy, const Budget& budget) const {
    const FactorLanguage lang = factor_set(spec_, 2L * radius_ + 1, budget);
    std::map<Word, Mat2> table;
    for (const Word& w : lang.words) table[w] = eval_(energy, w);
    return LocallyConstantCocycle(spec_, radius_, std::move(table),
                                  LocallyConstantCocycle::kDefaultDetTol, budget);
}

std::vector<Mat2> CocycleFamily::materialize(double energy,
                                             const std::vector<Word>& windows) const {
    std::vector<Mat2> mats;
    mats.reserve(windows.size());
    for (const Word& w : windows) mats.push_back(eval_(energy, w));
    return mats;
}

}  // namespace cocyclelab
