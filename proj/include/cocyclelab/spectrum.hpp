#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/uniformity.hpp"

namespace cocyclelab::spectrum {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// Uniform energy grid on [e_min, e_max] with the given step.
struct EnergyGrid {
    double e_min = 0.0;
    double e_max = 0.0;
    double step = 0.0;

    std::vector<double> points() const;
};

// Closed spectral bands of a periodic potential, sorted and with disjoint
// interiors (touching bands merge).
struct BandSet {
    std::vector<Interval> bands;
    double measure() const;
};

// Band set of the period-p discrete Schrodinger operator with potential
// `values`: { E : |D(E)| <= 2 } where D is the trace of the period transfer
// product.  Crossings of D = +-2 are located by sign change on a grid of the
// given resolution and bisected to 1e-10; bands narrower than the
// resolution can be missed.
BandSet periodic_spectrum(const std::vector<double>& values, double resolution);

// trace of the transfer product over one period at energy E
double discriminant(const std::vector<double>& values, double energy);

double spectrum_measure(const std::vector<Interval>& intervals);

// 2 m eps + sum of lengths: measure bound for an m-interval cover inflated
// by eps
double covering_bound(const std::vector<Interval>& intervals, double eps, std::int64_t m);

enum class EnergyVerdictClass { Resolvent, CandidateSmallExponent, CandidateUnresolved };

std::string to_string(EnergyVerdictClass cls);

struct EnergyVerdict {
    double energy = 0.0;
    EnergyVerdictClass cls = EnergyVerdictClass::CandidateUnresolved;
    double exponent_at_horizon = 0.0;
    std::optional<hyperbolicity::UhCertificate> certificate;
    std::optional<std::int64_t> small_exponent_from;
    bool budget_degraded = false;
};

struct ScanParams {
    std::int64_t horizon = 256;
    double epsilon = 0.05;       // small-exponent threshold for the Z-like subclass
    double uh_margin = 1e-3;
    std::int64_t uh_block_max = 16;
    int threads = 1;
};

// Grid classification plus the padded candidate intervals.  Resolvent
// entries carry a replayable cone certificate; candidacy is a finite-scale
// statement, so the interval set over-approximates the spectrum up to grid
// resolution.
struct SpectrumEstimate {
    std::vector<EnergyVerdict> energies;
    std::vector<Interval> candidate_intervals;
    double measure = 0.0;
    EnergyGrid grid;
    ScanParams params;
};

SpectrumEstimate scan_spectrum(const LayeredSamplingFunction& f, const SubshiftSpec& spec,
                               const EnergyGrid& grid, const ScanParams& params = {},
                               const Budget& budget = {});

struct ApproximantLevel {
    int level = 0;
    std::int64_t period = 0;
    BandSet bands;
    double measure = 0.0;
};

// Periodic approximants: the level-k potential is f read along the length
// (q_k + 2r) prefix, with q_k the continued-fraction denominators for
// Sturmian specs, |rule^k(seed)| for substitutions, k * |word| for periodic
// words, and the running period product for Toeplitz codings.
std::vector<ApproximantLevel> approximant_sequence(const LayeredSamplingFunction& f,
                                                   const SubshiftSpec& spec, int max_level,
                                                   double resolution = 0.0,
                                                   const Budget& budget = {});

std::vector<std::int64_t> approximant_periods(const SubshiftSpec& spec, int max_level,
                                              const Budget& budget = {});

struct SemicontinuityReport {
    bool inside = false;
    double epsilon = 0.0;            // ||f - g||_inf over the legal windows
    double max_distance = 0.0;       // max over g-bands of dist(., f-bands)
    double violation = 0.0;          // max(0, max_distance - epsilon)
    BandSet f_bands;
    BandSet g_bands;
};

// Level-k check that the bands of g sit inside the eps-neighborhood of the
// bands of f, eps = ||f - g||_inf.
SemicontinuityReport semicontinuity_probe(const LayeredSamplingFunction& f,
                                          const LayeredSamplingFunction& g,
                                          const SubshiftSpec& spec, int level,
                                          double resolution = 0.0, const Budget& budget = {});

}  // namespace cocyclelab::spectrum
