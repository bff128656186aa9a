#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cocyclelab/budget.hpp"
#include "cocyclelab/mat2.hpp"
#include "cocyclelab/sampling.hpp"
#include "cocyclelab/subshift.hpp"

namespace cocyclelab {

// Locally constant SL(2,R) cocycle: one matrix per legal (2r+1)-window.
// Construction checks that the table covers the legal language and that
// every entry is unimodular; entries with positive but off-by-more-than
// det_tol determinant are renormalized by 1/sqrt(det) and a warning kept.
class LocallyConstantCocycle {
public:
    static constexpr double kDefaultDetTol = 1e-10;

    LocallyConstantCocycle(SubshiftSpec spec, int window_radius, std::map<Word, Mat2> table,
                           double det_tol = kDefaultDetTol, const Budget& budget = {});

    // window-independent cocycle (radius 0)
    static LocallyConstantCocycle constant(SubshiftSpec spec, const Mat2& m,
                                           const Budget& budget = {});

    const SubshiftSpec& spec() const { return spec_; }
    int window_radius() const { return radius_; }
    long window_length() const { return 2L * radius_ + 1; }
    const std::map<Word, Mat2>& table() const { return table_; }
    const std::vector<std::string>& construction_warnings() const { return warnings_; }

    const Mat2& eval(const Word& window) const;

    // max over windows of log ||A(window)||; equals the step constant c
    // since ||B|| == ||B^{-1}|| in SL(2,R)
    double max_step_log_norm() const;

private:
    SubshiftSpec spec_;
    int radius_;
    std::map<Word, Mat2> table_;
    std::vector<std::string> warnings_;
};

// Schrodinger cocycle window -> [[E - f(window), -1], [1, 0]] at the
// sampling function's radius.  f must be finite-layered (tail == 0).
LocallyConstantCocycle schrodinger_cocycle(const LayeredSamplingFunction& f,
                                           const SubshiftSpec& spec, double energy,
                                           const Budget& budget = {});

// n-step product A_n(omega) along a configuration word; `start` is the index
// of omega_0 inside `configuration`.  Negative n multiplies single-factor
// adjugate inverses.  Throws InsufficientConfigurationError when the
// configuration does not supply all touched windows.
Mat2 iterate(const LocallyConstantCocycle& cocycle, const Word& configuration, std::int64_t start,
             std::int64_t n);

// Same product kept in log scale; safe for long n.
ScaledMat2 iterate_scaled(const LocallyConstantCocycle& cocycle, const Word& configuration,
                          std::int64_t start, std::int64_t n);

// (1/n) log ||A_n(omega)||, clamped at 0 (SL(2,R) norms are >= 1).
double finite_scale_exponent(const LocallyConstantCocycle& cocycle, const Word& configuration,
                             std::int64_t start, std::int64_t n);

struct ExponentExtrema {
    double max_exp = 0.0;
    double min_exp = 0.0;
    Word argmax;
    Word argmin;
};

// Exact extrema of (1/n) log ||A_n|| over the whole subshift: a locally
// constant product of length n reads only a (n + 2r)-window, so the sup over
// omega is a max over the enumerated factor set.
ExponentExtrema sup_exponent_exact(const LocallyConstantCocycle& cocycle, std::int64_t n,
                                   const Budget& budget = {});

struct ExponentPair {
    double max_exp = 0.0;
    double min_exp = 0.0;
};

// Extrema for every scale k = 1..n_max from one enumeration at length
// n_max + 2r (prefixes of legal words are legal, so intermediate products
// cover the full language at every k).
std::vector<ExponentPair> exponent_profile(const LocallyConstantCocycle& cocycle,
                                           std::int64_t n_max, const Budget& budget = {});

// --- one-parameter families ----------------------------------------------

// Window-id compilation of the factor language at product length n: turns
// the per-step table lookup into an array walk so per-energy slices reuse
// one enumeration.
struct CompiledEnsemble {
    SubshiftSpec spec;
    int radius = 0;
    std::int64_t n = 0;
    std::vector<Word> windows;                     // sorted legal (2r+1)-windows
    std::vector<std::vector<std::int32_t>> factors;  // per factor: window id per step
    bool exact = true;
};

CompiledEnsemble compile_ensemble(const SubshiftSpec& spec, int radius, std::int64_t n,
                                  const Budget& budget = {});

// Extrema at every k = 1..n for a materialized window table.
std::vector<ExponentPair> exponent_profile_compiled(const CompiledEnsemble& ensemble,
                                                    const std::vector<Mat2>& window_mats);

// Continuous-in-E family of locally constant cocycles over an energy
// interval.  Fixed-E slices materialize to LocallyConstantCocycle.
class CocycleFamily {
public:
    using EvalFn = std::function<Mat2(double energy, const Word& window)>;

    CocycleFamily(SubshiftSpec spec, int radius, double e_min, double e_max, EvalFn eval,
                  std::string kind);

    static CocycleFamily schrodinger(const LayeredSamplingFunction& f, SubshiftSpec spec,
                                     double e_min, double e_max);
    // A(E, .) = rotation by angle E, window-independent
    static CocycleFamily rotation_test(SubshiftSpec spec, double e_min, double e_max);
    // trivial E-dependence
    static CocycleFamily constant_in_energy(LocallyConstantCocycle cocycle, double e_min,
                                            double e_max);

    const SubshiftSpec& spec() const { return spec_; }
    int radius() const { return radius_; }
    double e_min() const { return e_min_; }
    double e_max() const { return e_max_; }
    const std::string& kind() const { return kind_; }

    Mat2 eval(double energy, const Word& window) const { return eval_(energy, window); }
    LocallyConstantCocycle slice(double energy, const Budget& budget = {}) const;
    std::vector<Mat2> materialize(double energy, const std::vector<Word>& windows) const;

private:
    SubshiftSpec spec_;
    int radius_;
    double e_min_, e_max_;
    EvalFn eval_;
    std::string kind_;
};

}  // namespace cocyclelab
