#include "cocyclelab/subshift.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <set>
#include <sstream>

#include "cocyclelab/errors.hpp"

namespace cocyclelab {
namespace {

std::string sorted_distinct(const std::string& s) {
    std::string out(s);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Primitive <=> some boolean power of the incidence matrix is all-ones.
// Wielandt's bound (m-1)^2 + 1 caps the exponent.
bool substitution_is_primitive(const std::map<char, Word>& rules, const std::string& alphabet) {
    const int m = static_cast<int>(alphabet.size());
    auto index = [&](char c) { return static_cast<int>(alphabet.find(c)); };
    std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
    for (const auto& [sym, image] : rules)
        for (char c : image) adj[index(sym)][index(c)] = true;

    std::vector<std::vector<bool>> power = adj;
    const int bound = (m - 1) * (m - 1) + 1;
    for (int k = 1; k <= bound; ++k) {
        bool all = true;
        for (const auto& row : power)
            for (bool v : row) all = all && v;
        if (all) return true;
        std::vector<std::vector<bool>> next(m, std::vector<bool>(m, false));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (power[i][j])
                    for (int l = 0; l < m; ++l)
                        if (adj[j][l]) next[i][l] = true;
        power = std::move(next);
    }
    return false;
}

Word apply_substitution(const std::map<char, Word>& rules, const Word& w) {
    Word out;
    out.reserve(w.size() * 2);
    for (char c : w) out += rules.at(c);
    return out;
}

Word expand_substitution(const SubshiftSpec::Substitution& sub, std::int64_t length) {
    Word w(1, sub.seed);
    const Word& seed_image = sub.rules.at(sub.seed);
    const bool prefix_preserving = seed_image.size() >= 1 && seed_image[0] == sub.seed;
    int guard = 0;
    while (static_cast<std::int64_t>(w.size()) < length) {
        Word next = apply_substitution(sub.rules, w);
        if (next.size() <= w.size() && ++guard > 8)
            throw ConfigError("substitution does not grow; cannot expand prefix");
        if (prefix_preserving && static_cast<std::int64_t>(next.size()) > length)
            next.resize(length);
        w = std::move(next);
    }
    w.resize(length);
    return w;
}

struct Convergent {
    std::int64_t p = 0, q = 1;
};

// First convergent of [0; a1, a2, ...] with denominator > threshold, else the
// top convergent (rational fallback).
Convergent convergent_above(const std::vector<std::int64_t>& cf, std::int64_t threshold) {
    std::int64_t p_prev = 1, p_cur = 0;  // p_{-1}, p_0
    std::int64_t q_prev = 0, q_cur = 1;  // q_{-1}, q_0
    for (std::int64_t a : cf) {
        const std::int64_t p_next = a * p_cur + p_prev;
        const std::int64_t q_next = a * q_cur + q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        if (q_cur > threshold) break;
    }
    return {p_cur, q_cur};
}

// Mechanical coding of the rotation by p/q: symbol k (1-based) is
// alphabet[0] iff floor((k+1) p/q) - floor(k p/q) == 1.  Exact as long as
// the requested range stays below the convergent denominator.
Word expand_sturmian(const SubshiftSpec::Sturmian& st, std::int64_t length) {
    const Convergent c = convergent_above(st.continued_fraction, length + 1);
    Word out;
    out.reserve(length);
    auto floor_k_alpha = [&](std::int64_t k) -> std::int64_t {
        return static_cast<std::int64_t>((static_cast<__int128>(k) * c.p) / c.q);
    };
    std::int64_t prev = floor_k_alpha(1);
    for (std::int64_t k = 1; k <= length; ++k) {
        const std::int64_t next = floor_k_alpha(k + 1);
        out.push_back(next - prev == 1 ? 'a' : 'b');
        prev = next;
    }
    return out;
}

Word expand_toeplitz(const SubshiftSpec::SimpleToeplitz& tz, std::int64_t length,
                     const Budget& budget) {
    // Block recursion: B_1 = b_1^{n_1 - 1},  B_{k+1} = (B_k b_{k+1})^{n_{k+1}-1} B_k.
    Word block(static_cast<size_t>(tz.periods[0] - 1), tz.coding[0]);
    size_t stage = 1;
    while (static_cast<std::int64_t>(block.size()) < length) {
        const char sym = tz.coding[stage % tz.coding.size()];
        const int n = tz.periods[stage % tz.periods.size()];
        Word next;
        next.reserve(static_cast<size_t>(n) * (block.size() + 1));
        for (int i = 0; i < n - 1; ++i) {
            next += block;
            next.push_back(sym);
        }
        next += block;
        block = std::move(next);
        ++stage;
        if (static_cast<std::int64_t>(block.size()) > 4 * budget.max_prefix_length)
            throw BudgetError("toeplitz expansion exceeded prefix budget");
    }
    block.resize(length);
    return block;
}

FactorLanguage cyclic_factors(const Word& period_word, long n) {
    const long p = static_cast<long>(period_word.size());
    Word extended;
    while (static_cast<long>(extended.size()) < n + p) extended += period_word;
    std::set<Word> words;
    for (long i = 0; i < p; ++i) words.insert(extended.substr(i, n));
    FactorLanguage out;
    out.n = n;
    out.words.assign(words.begin(), words.end());
    out.exact = true;
    return out;
}

std::vector<Word> scan_factors(const Word& prefix, long n) {
    std::set<Word> words;
    const long last = static_cast<long>(prefix.size()) - n;
    for (long i = 0; i <= last; ++i) words.insert(prefix.substr(i, n));
    return {words.begin(), words.end()};
}

// Positions of `text` ordered by their prefixes, compared up to `depth`
// characters (prefix doubling; ties beyond depth stay in index order, which
// is all the capped-LCP scan below needs).
std::vector<std::int32_t> sort_positions_by_prefix(const Word& text, long depth) {
    const std::int64_t n = static_cast<std::int64_t>(text.size());
    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::int32_t> rank(n), next_rank(n);
    for (std::int64_t i = 0; i < n; ++i) rank[i] = static_cast<unsigned char>(text[i]);

    std::vector<std::pair<std::int64_t, std::int32_t>> keys(n);
    for (long len = 1; len < depth; len *= 2) {
        for (std::int64_t i = 0; i < n; ++i) {
            const std::int64_t second = (i + len < n) ? rank[i + len] + 1 : 0;
            keys[i] = {static_cast<std::int64_t>(rank[i]) * (n + 1) + second,
                       static_cast<std::int32_t>(i)};
        }
        std::sort(keys.begin(), keys.end());
        std::int32_t r = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            if (i > 0 && keys[i].first != keys[i - 1].first) ++r;
            next_rank[keys[i].second] = r;
            order[i] = keys[i].second;
        }
        rank.swap(next_rank);
        if (r == n - 1) break;
    }
    return order;
}

std::vector<std::int32_t> adjacent_lcp_capped(const Word& text,
                                              const std::vector<std::int32_t>& order, long cap) {
    const std::int64_t n = static_cast<std::int64_t>(text.size());
    std::vector<std::int32_t> lcp(order.size(), 0);
    for (size_t i = 1; i < order.size(); ++i) {
        const std::int64_t x = order[i - 1], y = order[i];
        std::int32_t l = 0;
        while (l < cap && x + l < n && y + l < n && text[x + l] == text[y + l]) ++l;
        lcp[i] = l;
    }
    return lcp;
}

}  // namespace

SubshiftSpec::SubshiftSpec(Variant v, std::string alphabet)
    : variant_(std::move(v)), alphabet_(std::move(alphabet)) {}

SubshiftSpec SubshiftSpec::periodic(Word word) {
    if (word.empty()) throw ConfigError("periodic word must be nonempty");
    std::string alphabet = sorted_distinct(word);
    return SubshiftSpec(Periodic{std::move(word)}, std::move(alphabet));
}

SubshiftSpec SubshiftSpec::substitution(std::map<char, Word> rules, char seed) {
    if (rules.empty()) throw ConfigError("substitution needs at least one rule");
    std::string alphabet;
    for (const auto& [sym, image] : rules) alphabet.push_back(sym);
    if (rules.find(seed) == rules.end())
        throw ConfigError("substitution seed has no rule");
    std::size_t max_image = 0;
    for (const auto& [sym, image] : rules) {
        if (image.empty()) throw ConfigError("substitution image must be nonempty");
        for (char c : image)
            if (alphabet.find(c) == std::string::npos)
                throw ConfigError(std::string("substitution image uses unknown symbol '") + c +
                                  "'");
        max_image = std::max(max_image, image.size());
    }
    if (max_image < 2) throw ConfigError("substitution does not grow");
    if (!substitution_is_primitive(rules, alphabet))
        throw ConfigError("substitution rule is not primitive");
    return SubshiftSpec(Substitution{std::move(rules), seed}, std::move(alphabet));
}

SubshiftSpec SubshiftSpec::sturmian(std::vector<std::int64_t> continued_fraction, int min_terms) {
    if (static_cast<int>(continued_fraction.size()) < min_terms)
        throw ConfigError("sturmian continued fraction needs at least " +
                          std::to_string(min_terms) + " terms");
    for (std::int64_t a : continued_fraction)
        if (a < 1) throw ConfigError("sturmian continued-fraction terms must be >= 1");
    return SubshiftSpec(Sturmian{std::move(continued_fraction)}, "ab");
}

SubshiftSpec SubshiftSpec::simple_toeplitz(Word coding, std::vector<int> periods) {
    if (coding.empty()) throw ConfigError("toeplitz coding must be nonempty");
    if (periods.empty()) throw ConfigError("toeplitz period list must be nonempty");
    for (int p : periods)
        if (p < 2) throw ConfigError("toeplitz periods must be >= 2");
    std::string alphabet = sorted_distinct(coding);
    return SubshiftSpec(SimpleToeplitz{std::move(coding), std::move(periods)},
                        std::move(alphabet));
}

SubshiftSpec SubshiftSpec::disjoint_union(std::vector<SubshiftSpec> components) {
    if (components.size() < 2) throw ConfigError("union fixture needs >= 2 components");
    std::string alphabet;
    for (const auto& c : components) alphabet += c.alphabet();
    alphabet = sorted_distinct(alphabet);
    return SubshiftSpec(Union{std::move(components)}, std::move(alphabet));
}

SubshiftSpec SubshiftSpec::fibonacci() {
    return substitution({{'a', "ab"}, {'b', "a"}}, 'a');
}

SubshiftSpec SubshiftSpec::thue_morse() {
    return substitution({{'a', "ab"}, {'b', "ba"}}, 'a');
}

SubshiftSpec SubshiftSpec::period_doubling() {
    return substitution({{'a', "ab"}, {'b', "aa"}}, 'a');
}

SubshiftSpec SubshiftSpec::golden_sturmian(int terms) {
    return sturmian(std::vector<std::int64_t>(terms, 1));
}

std::string SubshiftSpec::describe() const {
    std::ostringstream os;
    if (const auto* p = std::get_if<Periodic>(&variant_)) {
        os << "periodic(" << p->word << ")";
    } else if (const auto* s = std::get_if<Substitution>(&variant_)) {
        os << "substitution(";
        bool first = true;
        for (const auto& [sym, image] : s->rules) {
            if (!first) os << ",";
            os << sym << "->" << image;
            first = false;
        }
        os << ";seed=" << s->seed << ")";
    } else if (const auto* st = std::get_if<Sturmian>(&variant_)) {
        os << "sturmian([";
        for (size_t i = 0; i < st->continued_fraction.size(); ++i)
            os << (i ? "," : "") << st->continued_fraction[i];
        os << "])";
    } else if (const auto* t = std::get_if<SimpleToeplitz>(&variant_)) {
        os << "toeplitz(" << t->coding << ";";
        for (size_t i = 0; i < t->periods.size(); ++i) os << (i ? "," : "") << t->periods[i];
        os << ")";
    } else if (const auto* u = std::get_if<Union>(&variant_)) {
        os << "union(";
        for (size_t i = 0; i < u->components.size(); ++i)
            os << (i ? "," : "") << u->components[i].describe();
        os << ")";
    }
    return os.str();
}

Word expand_prefix(const SubshiftSpec& spec, std::int64_t length, const Budget& budget) {
    if (length < 1) throw ConfigError("prefix length must be >= 1");
    if (length > budget.max_prefix_length)
        throw BudgetError("prefix length " + std::to_string(length) + " exceeds budget " +
                          std::to_string(budget.max_prefix_length));
    return std::visit(
        [&](const auto& v) -> Word {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SubshiftSpec::Periodic>) {
                Word out;
                out.reserve(length);
                while (static_cast<std::int64_t>(out.size()) < length) out += v.word;
                out.resize(length);
                return out;
            } else if constexpr (std::is_same_v<T, SubshiftSpec::Substitution>) {
                return expand_substitution(v, length);
            } else if constexpr (std::is_same_v<T, SubshiftSpec::Sturmian>) {
                return expand_sturmian(v, length);
            } else if constexpr (std::is_same_v<T, SubshiftSpec::SimpleToeplitz>) {
                return expand_toeplitz(v, length, budget);
            } else {
                return expand_prefix(v.components.front(), length, budget);
            }
        },
        spec.variant());
}

FactorLanguage factor_set(const SubshiftSpec& spec, long n, const Budget& budget) {
    if (n < 1) throw ConfigError("factor length must be >= 1");

    if (const auto* p = std::get_if<SubshiftSpec::Periodic>(&spec.variant()))
        return cyclic_factors(p->word, n);

    if (const auto* u = std::get_if<SubshiftSpec::Union>(&spec.variant())) {
        std::set<Word> merged;
        bool exact = true;
        for (const auto& c : u->components) {
            FactorLanguage part = factor_set(c, n, budget);
            merged.insert(part.words.begin(), part.words.end());
            exact = exact && part.exact;
        }
        FactorLanguage out;
        out.n = n;
        out.words.assign(merged.begin(), merged.end());
        out.exact = exact;
        return out;
    }

    // Doubling scan: stop when the factor set is unchanged across two
    // consecutive doublings.
    const std::int64_t start = std::max<std::int64_t>(64, 32 * static_cast<std::int64_t>(n));
    std::vector<Word> prev2, prev1;
    std::int64_t len = start;
    int have = 0;
    while (len <= budget.max_scan_length) {
        std::vector<Word> cur = scan_factors(expand_prefix(spec, len, budget), n);
        if (have >= 2 && cur == prev1 && prev1 == prev2) {
            const bool trusted = !std::holds_alternative<SubshiftSpec::SimpleToeplitz>(
                spec.variant());
            return {n, std::move(cur), trusted};
        }
        prev2 = std::move(prev1);
        prev1 = std::move(cur);
        have = std::min(have + 1, 2);
        len *= 2;
    }
    return {n, std::move(prev1), false};
}

double word_frequency(const SubshiftSpec& spec, const Word& w, std::int64_t sample_length,
                      const Budget& budget) {
    if (w.empty()) throw ConfigError("word must be nonempty");
    if (sample_length < 10 * static_cast<std::int64_t>(w.size()))
        throw ConfigError("sample length must be >= 10 * |w|");
    const Word prefix = expand_prefix(spec, sample_length, budget);
    const std::int64_t windows = sample_length - static_cast<std::int64_t>(w.size()) + 1;
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < windows; ++i)
        if (std::memcmp(prefix.data() + i, w.data(), w.size()) == 0) ++count;
    return static_cast<double>(count) / static_cast<double>(windows);
}

FrequencyTable frequency_table(const SubshiftSpec& spec, long n, std::int64_t sample_length,
                               const Budget& budget) {
    if (n < 1) throw ConfigError("factor length must be >= 1");
    if (sample_length < 10 * n) throw ConfigError("sample length must be >= 10 * n");
    const Word prefix = expand_prefix(spec, sample_length, budget);
    const std::int64_t windows = sample_length - n + 1;
    std::map<Word, std::int64_t> counts;
    for (std::int64_t i = 0; i < windows; ++i) ++counts[prefix.substr(i, n)];
    FrequencyTable out;
    out.n = n;
    out.sample_length = sample_length;
    for (const auto& [word, count] : counts)
        out.entries.emplace_back(word, static_cast<double>(count) / static_cast<double>(windows));
    return out;
}

BoshernitzanProfile boshernitzanprofile_scanned(const SubshiftSpec& spec, long n_max,
                                                std::int64_t sample_length,
                                                const Budget& budget) {
    const Word prefix = expand_prefix(spec, sample_length, budget);
    long depth = 1;
    while (depth < n_max) depth *= 2;
    const std::vector<std::int32_t> order = sort_positions_by_prefix(prefix, depth);
    const std::vector<std::int32_t> lcp = adjacent_lcp_capped(prefix, order, n_max);
    const std::int64_t size = static_cast<std::int64_t>(prefix.size());

    BoshernitzanProfile out;
    out.points.reserve(n_max);
    for (long n = 1; n <= n_max; ++n) {
        const std::int64_t windows = size - n + 1;
        std::int64_t min_count = windows + 1;
        std::int64_t run = 0;
        for (size_t i = 0; i < order.size(); ++i) {
            if (i > 0 && lcp[i] < n) {
                if (run > 0) min_count = std::min(min_count, run);
                run = 0;
            }
            if (order[i] + n <= size) ++run;
        }
        if (run > 0) min_count = std::min(min_count, run);
        const double freq = static_cast<double>(min_count) / static_cast<double>(windows);
        out.points.push_back({n, static_cast<double>(n) * freq});
    }
    out.exact = false;
    return out;
}

BoshernitzanProfile boshernitzan_profile(const SubshiftSpec& spec, long n_max,
                                         std::int64_t sample_length, const Budget& budget) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    if (sample_length < 10 * n_max)
        throw ConfigError("sample length must be >= 10 * n_max");

    BoshernitzanProfile out;
    if (const auto* p = std::get_if<SubshiftSpec::Periodic>(&spec.variant())) {
        // Cyclic counting is the exact invariant measure for periodic orbits.
        const long period = static_cast<long>(p->word.size());
        for (long n = 1; n <= n_max; ++n) {
            const FactorLanguage lang = cyclic_factors(p->word, n);
            Word extended = p->word;
            while (static_cast<long>(extended.size()) < n + period) extended += p->word;
            std::int64_t min_count = period;
            for (const Word& w : lang.words) {
                std::int64_t count = 0;
                for (long i = 0; i < period; ++i)
                    if (extended.compare(i, n, w) == 0) ++count;
                min_count = std::min(min_count, count);
            }
            out.points.push_back(
                {n, static_cast<double>(n) * static_cast<double>(min_count) / period});
        }
        out.exact = true;
    } else if (const auto* u = std::get_if<SubshiftSpec::Union>(&spec.variant())) {
        // Frequencies of a non-minimal union are orbit-dependent; report the
        // first component's profile.
        return boshernitzan_profile(u->components.front(), n_max, sample_length, budget);
    } else {
        out = boshernitzanprofile_scanned(spec, n_max, sample_length, budget);
    }

    for (long n = (n_max + 1) / 2; n <= n_max; ++n)
        out.limsup_proxy = std::max(out.limsup_proxy, out.points[n - 1].eta);
    return out;
}

}  // namespace cocyclelab
