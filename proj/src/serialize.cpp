#include "cocyclelab/serialize.hpp"

#include <cstdio>
#include <sstream>

#include "cocyclelab/errors.hpp"

namespace cocyclelab::serialize {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

json to_json(const SubshiftSpec& spec) {
    json j;
    if (const auto* p = std::get_if<SubshiftSpec::Periodic>(&spec.variant())) {
        j["variant"] = "periodic";
        j["word"] = p->word;
    } else if (const auto* s = std::get_if<SubshiftSpec::Substitution>(&spec.variant())) {
        j["variant"] = "substitution";
        json rules;
        for (const auto& [sym, image] : s->rules) rules[std::string(1, sym)] = image;
        j["rules"] = rules;
        j["seed"] = std::string(1, s->seed);
    } else if (const auto* st = std::get_if<SubshiftSpec::Sturmian>(&spec.variant())) {
        j["variant"] = "sturmian";
        j["continued_fraction"] = st->continued_fraction;
    } else if (const auto* t = std::get_if<SubshiftSpec::SimpleToeplitz>(&spec.variant())) {
        j["variant"] = "simple_toeplitz";
        j["coding"] = t->coding;
        j["periods"] = t->periods;
    } else if (const auto* u = std::get_if<SubshiftSpec::Union>(&spec.variant())) {
        j["variant"] = "disjoint_union";
        json parts = json::array();
        for (const auto& c : u->components) parts.push_back(to_json(c));
        j["components"] = parts;
    }
    return j;
}

SubshiftSpec subshift_from_json(const json& j) {
    if (!j.is_object() || !j.contains("variant"))
        throw ConfigError("subshift document needs a `variant` tag");
    const std::string variant = j.at("variant").get<std::string>();
    try {
        if (variant == "periodic") return SubshiftSpec::periodic(j.at("word").get<std::string>());
        if (variant == "substitution") {
            std::map<char, Word> rules;
            for (const auto& [key, value] : j.at("rules").items()) {
                if (key.size() != 1) throw ConfigError("substitution symbols are single chars");
                rules[key[0]] = value.get<std::string>();
            }
            const std::string seed = j.at("seed").get<std::string>();
            if (seed.size() != 1) throw ConfigError("substitution seed is a single char");
            return SubshiftSpec::substitution(std::move(rules), seed[0]);
        }
        if (variant == "sturmian")
            return SubshiftSpec::sturmian(
                j.at("continued_fraction").get<std::vector<std::int64_t>>());
        if (variant == "simple_toeplitz")
            return SubshiftSpec::simple_toeplitz(j.at("coding").get<std::string>(),
                                                 j.at("periods").get<std::vector<int>>());
        if (variant == "disjoint_union") {
            std::vector<SubshiftSpec> parts;
            for (const auto& c : j.at("components")) parts.push_back(subshift_from_json(c));
            return SubshiftSpec::disjoint_union(std::move(parts));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed subshift document: ") + e.what());
    }
    throw ConfigError("unknown subshift variant \"" + variant + "\"");
}

json to_json(const Mat2& m) { return json::array({m.a, m.b, m.c, m.d}); }

Mat2 mat2_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ConfigError("matrix must be a 4-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json to_json(const LayeredSamplingFunction& f) {
    json layers = json::array();
    for (const auto& layer : f.layers()) {
        json table;
        for (const auto& [window, value] : layer.table) table[window] = value;
        layers.push_back(
            {{"radius", layer.radius}, {"coefficient", layer.coefficient}, {"table", table}});
    }
    return {{"layers", layers}, {"tail", f.tail()}};
}

LayeredSamplingFunction sampling_from_json(const json& j) {
    try {
        std::vector<SamplingLayer> layers;
        for (const auto& lj : j.at("layers")) {
            SamplingLayer layer;
            layer.radius = lj.at("radius").get<int>();
            layer.coefficient = lj.value("coefficient", 1.0);
            for (const auto& [window, value] : lj.at("table").items())
                layer.table[window] = value.get<double>();
            layers.push_back(std::move(layer));
        }
        return LayeredSamplingFunction(std::move(layers), j.value("tail", 0.0));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed sampling document: ") + e.what());
    }
}

json to_json(const LocallyConstantCocycle& cocycle) {
    json table;
    for (const auto& [window, m] : cocycle.table()) table[window] = to_json(m);
    return {{"window_radius", cocycle.window_radius()},
            {"subshift", to_json(cocycle.spec())},
            {"table", table}};
}

LocallyConstantCocycle cocycle_from_json(const json& j, const Budget& budget) {
    try {
        SubshiftSpec spec = subshift_from_json(j.at("subshift"));
        std::map<Word, Mat2> table;
        for (const auto& [window, m] : j.at("table").items())
            table[window] = mat2_from_json(m);
        return LocallyConstantCocycle(std::move(spec), j.at("window_radius").get<int>(),
                                      std::move(table),
                                      LocallyConstantCocycle::kDefaultDetTol, budget);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed cocycle document: ") + e.what());
    }
}

json to_json(const hyperbolicity::UhCertificate& cert) {
    json cones;
    for (const auto& [window, cone] : cert.cones)
        cones[window] = json::array({cone.center, cone.half_width});
    return {{"block_length", cert.block_length},
            {"margin", cert.margin},
            {"min_expansion", cert.min_expansion},
            {"exponent_lower_bound", cert.exponent_lower_bound},
            {"min_angular_margin", cert.min_angular_margin},
            {"cones", cones}};
}

hyperbolicity::UhCertificate uh_certificate_from_json(const json& j) {
    try {
        hyperbolicity::UhCertificate cert;
        cert.block_length = j.at("block_length").get<std::int64_t>();
        cert.margin = j.at("margin").get<double>();
        cert.min_expansion = j.at("min_expansion").get<double>();
        cert.exponent_lower_bound = j.at("exponent_lower_bound").get<double>();
        cert.min_angular_margin = j.at("min_angular_margin").get<double>();
        for (const auto& [window, cone] : j.at("cones").items())
            cert.cones[window] = {cone[0].get<double>(), cone[1].get<double>()};
        return cert;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed certificate document: ") + e.what());
    }
}

json to_json(const hyperbolicity::SplittingSample& sample) {
    json points = json::array();
    for (const auto& p : sample.points)
        points.push_back({{"position", p.position},
                          {"unstable_angle", p.unstable_angle},
                          {"stable_angle", p.stable_angle},
                          {"equivariance_residual_unstable", p.equivariance_residual_unstable},
                          {"equivariance_residual_stable", p.equivariance_residual_stable},
                          {"transversality_angle", p.transversality_angle}});
    return {{"points", points},
            {"contraction_C", sample.contraction_C},
            {"contraction_lambda", sample.contraction_lambda},
            {"max_equivariance_residual", sample.max_equivariance_residual},
            {"min_singular_gap", sample.min_singular_gap}};
}

json to_json(const hyperbolicity::SpreadReport& report) {
    json trace = json::array();
    for (const auto& p : report.trace)
        trace.push_back({{"n", p.n}, {"sup_exp", p.sup_exp}, {"min_exp", p.min_exp}});
    return {{"trace", trace},
            {"first_spread", report.first_spread},
            {"last_spread", report.last_spread},
            {"spread_shrinks", report.spread_shrinks}};
}

namespace {

json verdict_to_json(const uniformity::Verdict& verdict) {
    json j{{"kind", uniformity::to_string(verdict.kind)},
           {"epsilon", verdict.epsilon},
           {"lyapunov", verdict.lyapunov}};
    if (verdict.band) j["band"] = json::array({verdict.band->lo, verdict.band->hi});
    return j;
}

}  // namespace

json to_json(const uniformity::UniformityReport& report) {
    json exp_trace = json::array();
    for (const auto& p : report.exponent_trace)
        exp_trace.push_back({{"n", p.n}, {"sup_exp", p.sup_exp}, {"min_exp", p.min_exp}});
    json var_trace = json::array();
    for (const auto& p : report.var_trace)
        var_trace.push_back({{"n", p.n}, {"var_over_n", p.var_over_n}});
    return {{"exponent_trace", exp_trace},
            {"var_trace", var_trace},
            {"verdict", verdict_to_json(report.verdict)},
            {"params",
             {{"e_min", report.params.e_min},
              {"e_max", report.params.e_max},
              {"grid_size", report.params.grid_size},
              {"epsilon", report.params.epsilon},
              {"horizons", report.params.horizons}}}};
}

json to_json(const uniformity::AvalancheCertificate& cert) {
    return {{"L", cert.L},
            {"epsilon", cert.epsilon},
            {"block_l", cert.block_l},
            {"kappa", cert.params.kappa},
            {"lambda0", cert.params.lambda0},
            {"band", json::array({cert.band.lo, cert.band.hi})},
            {"validation_horizon", cert.validation_horizon},
            {"band_validated", cert.band_validated},
            {"worst_band_margin", cert.worst_band_margin}};
}

json to_json(const uniformity::AvalancheOutcome& outcome) {
    json j{{"certified", outcome.certified()}};
    if (outcome.certified())
        j["certificate"] = to_json(*outcome.certificate);
    else {
        j["refused_condition"] = outcome.refused_condition;
        j["detail"] = outcome.detail;
    }
    return j;
}

json to_json(const uniformity::OpennessReport& report) {
    return {{"passed", report.passed},
            {"trials", report.trials},
            {"failures", report.failures},
            {"base_refusal", report.base_refusal}};
}

json to_json(const std::vector<uniformity::EnergyClassification>& classes) {
    json out = json::array();
    for (const auto& c : classes) {
        json j{{"energy", c.energy},
               {"class", uniformity::to_string(c.cls)},
               {"exponent_at_horizon", c.exponent_at_horizon}};
        if (c.certified_from) j["certified_from"] = *c.certified_from;
        if (c.certificate) j["uh_exponent_lower_bound"] = c.certificate->exponent_lower_bound;
        if (!c.note.empty()) j["note"] = c.note;
        out.push_back(std::move(j));
    }
    return out;
}

json to_json(const spectrum::BandSet& bands) {
    json out = json::array();
    for (const auto& band : bands.bands) out.push_back(json::array({band.lo, band.hi}));
    return {{"bands", out}, {"measure", bands.measure()}};
}

json to_json(const spectrum::SpectrumEstimate& estimate) {
    json intervals = json::array();
    for (const auto& iv : estimate.candidate_intervals)
        intervals.push_back(json::array({iv.lo, iv.hi}));
    json energies = json::array();
    for (const auto& e : estimate.energies) {
        json j{{"energy", e.energy},
               {"class", spectrum::to_string(e.cls)},
               {"exponent_at_horizon", e.exponent_at_horizon}};
        if (e.small_exponent_from) j["small_exponent_from"] = *e.small_exponent_from;
        if (e.certificate) j["uh_exponent_lower_bound"] = e.certificate->exponent_lower_bound;
        if (e.budget_degraded) j["budget_degraded"] = true;
        energies.push_back(std::move(j));
    }
    return {{"energies", energies},
            {"candidate_intervals", intervals},
            {"measure", estimate.measure},
            {"grid",
             {{"e_min", estimate.grid.e_min},
              {"e_max", estimate.grid.e_max},
              {"step", estimate.grid.step}}},
            {"params",
             {{"horizon", estimate.params.horizon},
              {"epsilon", estimate.params.epsilon},
              {"uh_margin", estimate.params.uh_margin},
              {"uh_block_max", estimate.params.uh_block_max}}}};
}

json to_json(const std::vector<spectrum::ApproximantLevel>& levels) {
    json out = json::array();
    for (const auto& level : levels) {
        json bands = json::array();
        for (const auto& band : level.bands.bands)
            bands.push_back(json::array({band.lo, band.hi}));
        out.push_back({{"level", level.level},
                       {"period", level.period},
                       {"bands", bands},
                       {"measure", level.measure}});
    }
    return out;
}

json to_json(const spectrum::SemicontinuityReport& report) {
    return {{"inside", report.inside},
            {"epsilon", report.epsilon},
            {"max_distance", report.max_distance},
            {"violation", report.violation},
            {"f_bands", to_json(report.f_bands)},
            {"g_bands", to_json(report.g_bands)}};
}

json to_json(const approximation::BlendedFamily& family) {
    json tables = json::array();
    for (std::size_t k = 0; k < family.nodes.size(); ++k) {
        json table;
        for (std::size_t w = 0; w < family.windows.size(); ++w)
            table[family.windows[w]] = to_json(family.tables[k][w]);
        tables.push_back({{"node", family.nodes[k]}, {"table", table}});
    }
    return {{"subshift", to_json(family.spec)},
            {"radius", family.radius},
            {"interval", json::array({family.j_min, family.j_max})},
            {"slices", tables}};
}

json to_json(const approximation::ApproximationResult& result) {
    return {{"family", to_json(result.family)},
            {"requested_error", result.requested_error},
            {"achieved_sup_error", result.achieved_sup_error},
            {"cover_count", result.cover_count},
            {"min_blend_det", result.min_blend_det},
            {"max_blend_det", result.max_blend_det}};
}

json to_json(const approximation::ConstructionResult& result) {
    json stages = json::array();
    for (const auto& s : result.stages) {
        json j{{"stage", s.stage},
               {"epsilon", s.epsilon},
               {"delta", s.delta},
               {"candidates_tried", s.candidates_tried},
               {"trials", s.trials},
               {"partial_sum_passes", s.partial_sum_passes},
               {"passed", s.passed}};
        if (!s.note.empty()) j["note"] = s.note;
        stages.push_back(std::move(j));
    }
    return {{"stages", stages},
            {"delta_schedule", result.delta_schedule},
            {"completed", result.completed},
            {"certification", result.certification},
            {"function", to_json(result.function)}};
}

std::string factors_csv(const FactorLanguage& language) {
    std::ostringstream os;
    os << "word\n";
    for (const Word& w : language.words) os << w << "\n";
    return os.str();
}

std::string frequency_csv(const FrequencyTable& table) {
    std::ostringstream os;
    os << "word,frequency\n";
    for (const auto& [word, freq] : table.entries)
        os << word << "," << format_double(freq) << "\n";
    return os.str();
}

std::string boshernitzan_csv(const BoshernitzanProfile& profile) {
    std::ostringstream os;
    os << "n,eta,exact\n";
    for (const auto& p : profile.points)
        os << p.n << "," << format_double(p.eta) << "," << (profile.exact ? "true" : "false")
           << "\n";
    return os.str();
}

std::string traces_csv(const std::vector<uniformity::ExponentTracePoint>& exponent_trace,
                       const std::vector<uniformity::VarTracePoint>& var_trace) {
    std::ostringstream os;
    os << "n,sup_exp,min_exp,var_over_n\n";
    for (std::size_t i = 0; i < exponent_trace.size(); ++i) {
        const double var = i < var_trace.size() ? var_trace[i].var_over_n : 0.0;
        os << exponent_trace[i].n << "," << format_double(exponent_trace[i].sup_exp) << ","
           << format_double(exponent_trace[i].min_exp) << "," << format_double(var) << "\n";
    }
    return os.str();
}

std::string energies_csv(const spectrum::SpectrumEstimate& estimate) {
    std::ostringstream os;
    os << "E,class,exponent,certificate_id\n";
    std::size_t cert_id = 0;
    for (const auto& e : estimate.energies) {
        os << format_double(e.energy) << "," << spectrum::to_string(e.cls) << ","
           << format_double(e.exponent_at_horizon) << ",";
        if (e.certificate) os << "uh-" << cert_id++;
        os << "\n";
    }
    return os.str();
}

std::string bands_csv(const std::vector<spectrum::ApproximantLevel>& levels) {
    std::ostringstream os;
    os << "k,band_lo,band_hi\n";
    for (const auto& level : levels)
        for (const auto& band : level.bands.bands)
            os << level.level << "," << format_double(band.lo) << "," << format_double(band.hi)
               << "\n";
    return os.str();
}

}  // namespace cocyclelab::serialize
