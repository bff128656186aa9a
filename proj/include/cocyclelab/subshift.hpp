#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cocyclelab/budget.hpp"

namespace cocyclelab {

using Word = std::string;

// Finite description of a minimal subshift.  Use the static factories; they
// validate the description (nonempty periodic word, primitive substitution,
// long-enough continued fraction, periods >= 2).
//
// `disjoint_union` deliberately skips the minimality story: it glues several
// subshifts into one non-minimal system and exists to exercise behavior that
// only appears without unique ergodicity.  Canonical-orbit operations
// (expand_prefix, frequencies) read from the first component.
class SubshiftSpec {
public:
    struct Periodic {
        Word word;
    };
    struct Substitution {
        std::map<char, Word> rules;
        char seed = 0;
    };
    // alpha = [0; a1, a2, ...] in (0,1).  Prefixes are generated from the
    // first convergent p/q with q > requested length, in exact integer
    // arithmetic; if the expansion is too short the top convergent is used
    // as a rational fallback (the orbit is then q-periodic).
    struct Sturmian {
        std::vector<std::int64_t> continued_fraction;
    };
    // Cycled coding symbols and cycled periods; stage k writes coding[k mod ..]
    // into the current holes with period periods[k mod ..].
    struct SimpleToeplitz {
        Word coding;
        std::vector<int> periods;
    };
    struct Union {
        std::vector<SubshiftSpec> components;
    };
    using Variant = std::variant<Periodic, Substitution, Sturmian, SimpleToeplitz, Union>;

    static SubshiftSpec periodic(Word word);
    static SubshiftSpec substitution(std::map<char, Word> rules, char seed);
    static SubshiftSpec sturmian(std::vector<std::int64_t> continued_fraction,
                                 int min_terms = kMinContinuedFractionTerms);
    static SubshiftSpec simple_toeplitz(Word coding, std::vector<int> periods);
    // Test fixture; not minimal, not uniquely ergodic.
    static SubshiftSpec disjoint_union(std::vector<SubshiftSpec> components);

    static SubshiftSpec fibonacci();
    static SubshiftSpec thue_morse();
    static SubshiftSpec period_doubling();
    static SubshiftSpec golden_sturmian(int terms = 40);

    static constexpr int kMinContinuedFractionTerms = 2;

    const Variant& variant() const { return variant_; }
    const std::string& alphabet() const { return alphabet_; }
    bool is_union() const { return std::holds_alternative<Union>(variant_); }
    std::string describe() const;

private:
    SubshiftSpec(Variant v, std::string alphabet);
    Variant variant_;
    std::string alphabet_;  // sorted, distinct
};

// All length-n factors (sorted) plus whether the set is trusted exact.
struct FactorLanguage {
    long n = 0;
    std::vector<Word> words;
    bool exact = false;
};

// Empirical cylinder frequencies of all length-n factors.
struct FrequencyTable {
    long n = 0;
    std::vector<std::pair<Word, double>> entries;  // sorted by word
    std::int64_t sample_length = 0;
    bool exact = false;
};

struct BoshernitzanPoint {
    long n = 0;
    double eta = 0.0;  // n * min cylinder frequency at length n
};

struct BoshernitzanProfile {
    std::vector<BoshernitzanPoint> points;
    bool exact = false;
    // max of eta over the top half of the range; a positive value is the
    // finite-scale proxy for limsup n * min mu([w]) > 0
    double limsup_proxy = 0.0;
};

// First `length` symbols of the canonical element (substitution fixed point,
// mechanical word, periodic repetition, Toeplitz filling).
Word expand_prefix(const SubshiftSpec& spec, std::int64_t length, const Budget& budget = {});

// Factor enumeration by prefix scanning: lengths double until the factor set
// is unchanged across two consecutive doublings.  Periodic specs take an
// exact cyclic fast path.  On scan exhaustion the result is flagged sampled,
// never silently exact.
FactorLanguage factor_set(const SubshiftSpec& spec, long n, const Budget& budget = {});

// Sliding-window occurrence count over the canonical prefix, divided by the
// number of windows.  Requires sample_length >= 10 * |w|.
double word_frequency(const SubshiftSpec& spec, const Word& w, std::int64_t sample_length,
                      const Budget& budget = {});

FrequencyTable frequency_table(const SubshiftSpec& spec, long n, std::int64_t sample_length,
                               const Budget& budget = {});

// (n, n * min frequency) for n = 1..n_max.  Periodic components are counted
// cyclically (exact); everything else from the scanned prefix.
BoshernitzanProfile boshernitzan_profile(const SubshiftSpec& spec, long n_max,
                                         std::int64_t sample_length, const Budget& budget = {});

}  // namespace cocyclelab
