#include "cocyclelab/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cocyclelab/errors.hpp"
#include "cocyclelab/serialize.hpp"
#include "cocyclelab/version.hpp"

namespace cocyclelab::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cocyclelab::serialize;

namespace {

struct RunContext {
    fs::path out_dir;
    json manifest;
    std::vector<std::string> outputs;
    std::vector<std::string> soft_failures;
    Budget budget;
    std::uint64_t seed = 42;
    int threads = 1;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json config;
    try {
        in >> config;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!config.is_object()) throw ConfigError("config root must be a JSON object");
    return config;
}

void write_file(RunContext& ctx, const std::string& name, const std::string& body) {
    const fs::path path = ctx.out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file " + path.string());
    out << body;
    ctx.outputs.push_back(name);
}

void write_json(RunContext& ctx, const std::string& name, const json& j) {
    write_file(ctx, name, j.dump(2) + "\n");
}

SubshiftSpec spec_from_config(const json& config) {
    if (!config.contains("subshift")) throw ConfigError("config needs a `subshift` document");
    return subshift_from_json(config.at("subshift"));
}

LayeredSamplingFunction sampling_from_config(const json& config, const char* key = "sampling") {
    if (!config.contains(key))
        throw ConfigError(std::string("config needs a `") + key + "` document");
    return sampling_from_json(config.at(key));
}

std::vector<std::int64_t> horizons_from_config(const json& config,
                                               std::vector<std::int64_t> fallback) {
    if (!config.contains("horizons")) return fallback;
    auto h = config.at("horizons").get<std::vector<std::int64_t>>();
    if (h.empty()) throw ConfigError("`horizons` must be nonempty");
    return h;
}

std::vector<double> grid_points_from_config(const json& g) {
    if (g.contains("points")) return g.at("points").get<std::vector<double>>();
    spectrum::EnergyGrid grid{g.at("min").get<double>(), g.at("max").get<double>(),
                              g.at("step").get<double>()};
    return grid.points();
}

LocallyConstantCocycle cocycle_from_config(const json& config, const RunContext& ctx) {
    if (config.contains("cocycle")) return cocycle_from_json(config.at("cocycle"), ctx.budget);
    if (config.contains("sampling") && config.contains("energy")) {
        return schrodinger_cocycle(sampling_from_config(config), spec_from_config(config),
                                   config.at("energy").get<double>(), ctx.budget);
    }
    throw ConfigError("config needs either `cocycle` or `sampling` + `energy`");
}

// --- commands --------------------------------------------------------------

void run_subshift(const json& config, const Options& options, RunContext& ctx) {
    const SubshiftSpec spec = spec_from_config(config);

    std::optional<long> prefix_length = options.prefix_length;
    if (!prefix_length && config.contains("prefix_length"))
        prefix_length = config.at("prefix_length").get<long>();
    if (prefix_length)
        write_file(ctx, "prefix.txt", expand_prefix(spec, *prefix_length, ctx.budget) + "\n");

    std::vector<long> factor_lengths;
    if (config.contains("factor_lengths"))
        factor_lengths = config.at("factor_lengths").get<std::vector<long>>();
    if (options.factors_length) factor_lengths.push_back(*options.factors_length);
    for (long n : factor_lengths) {
        const FactorLanguage language = factor_set(spec, n, ctx.budget);
        if (!language.exact)
            ctx.soft_failures.push_back("factor set at n=" + std::to_string(n) +
                                        " is sampled, not exact");
        write_file(ctx, "factors_" + std::to_string(n) + ".csv", factors_csv(language));
    }

    if (config.contains("frequencies")) {
        const auto& fj = config.at("frequencies");
        const FrequencyTable table =
            frequency_table(spec, fj.at("n").get<long>(),
                            fj.at("sample_length").get<std::int64_t>(), ctx.budget);
        write_file(ctx, "frequencies.csv", frequency_csv(table));
    }

    std::optional<long> bosh_n_max = options.boshernitzan_n_max;
    std::int64_t bosh_sample = 1'000'000;
    if (config.contains("boshernitzan")) {
        const auto& bj = config.at("boshernitzan");
        if (!bosh_n_max) bosh_n_max = bj.at("n_max").get<long>();
        bosh_sample = bj.value("sample_length", bosh_sample);
    }
    if (bosh_n_max) {
        const BoshernitzanProfile profile =
            boshernitzan_profile(spec, *bosh_n_max, bosh_sample, ctx.budget);
        write_file(ctx, "boshernitzan.csv", boshernitzan_csv(profile));
        ctx.manifest["boshernitzan_limsup_proxy"] = profile.limsup_proxy;
    }
}

void run_exponent(const json& config, RunContext& ctx) {
    const std::vector<std::int64_t> horizons =
        horizons_from_config(config, {32, 64, 128, 256});
    const double epsilon = config.value("epsilon", 0.1);

    if (config.contains("sampling")) {
        const SubshiftSpec spec = spec_from_config(config);
        const LayeredSamplingFunction f = sampling_from_config(config);
        if (!config.contains("energy_grid"))
            throw ConfigError("exponent command needs an `energy_grid`");
        const std::vector<double> grid = grid_points_from_config(config.at("energy_grid"));
        const CocycleFamily family = CocycleFamily::schrodinger(
            f, spec, grid.front(), grid.back());
        const uniformity::UniformityReport report = uniformity::uniformity_verdict(
            family, grid, horizons, epsilon, ctx.budget, ctx.threads);
        write_file(ctx, "traces.csv", traces_csv(report.exponent_trace, report.var_trace));
        write_json(ctx, "report.json", to_json(report));
    } else {
        const LocallyConstantCocycle cocycle = cocycle_from_config(config, ctx);
        const CocycleFamily family = CocycleFamily::constant_in_energy(cocycle, 0.0, 0.0);
        const uniformity::UniformityReport report = uniformity::uniformity_verdict(
            family, {0.0}, horizons, epsilon, ctx.budget, ctx.threads);
        write_file(ctx, "traces.csv", traces_csv(report.exponent_trace, report.var_trace));
        write_json(ctx, "report.json", to_json(report));
    }
}

void run_uh(const json& config, RunContext& ctx) {
    const LocallyConstantCocycle cocycle = cocycle_from_config(config, ctx);
    const double margin = config.value("margin", 0.05);
    const std::int64_t block_max = config.value("block_max", std::int64_t{16});
    std::int64_t block = config.value("block_length", std::int64_t{1});

    hyperbolicity::UhResult result{std::nullopt, std::nullopt};
    for (; block <= block_max; block *= 2) {
        result = hyperbolicity::certify_uh(cocycle, block, margin, ctx.budget);
        if (result.certified() || config.contains("block_length")) break;
    }

    json j{{"certified", result.certified()}};
    if (result.certified()) {
        j["certificate"] = to_json(*result.certificate);
    } else if (result.refusal) {
        j["refusal"] = {{"reason", result.refusal->reason}, {"detail", result.refusal->detail}};
        ctx.soft_failures.push_back("uh refusal: " + result.refusal->reason);
    }
    write_json(ctx, "uh.json", j);

    if (config.contains("splitting") && result.certified()) {
        const auto& sj = config.at("splitting");
        const std::int64_t n = sj.value("n", std::int64_t{16});
        const std::int64_t config_length = sj.value("configuration_length",
                                                    std::int64_t{4 * n + 64});
        const Word configuration = expand_prefix(cocycle.spec(), config_length, ctx.budget);
        write_json(ctx, "splitting.json",
                   to_json(hyperbolicity::extract_splitting(cocycle, configuration, n)));
    }
}

void run_avalanche(const json& config, RunContext& ctx) {
    const LocallyConstantCocycle cocycle = cocycle_from_config(config, ctx);
    const double L = config.at("L").get<double>();
    const std::int64_t l = config.at("l").get<std::int64_t>();
    const double epsilon = config.at("epsilon").get<double>();
    uniformity::AvalancheParams params;
    params.kappa = config.value("kappa", params.kappa);
    params.lambda0 = config.value("lambda0", params.lambda0);
    const std::int64_t horizon = config.value("validation_horizon", std::int64_t{4096});

    const uniformity::AvalancheOutcome outcome =
        uniformity::avalanche_check(cocycle, L, l, epsilon, params, horizon, ctx.budget);
    json j = to_json(outcome);
    if (!outcome.certified())
        ctx.soft_failures.push_back("avalanche refusal at " + outcome.refused_condition);

    if (config.contains("openness")) {
        const auto& oj = config.at("openness");
        const uniformity::OpennessReport probe = uniformity::openness_probe(
            cocycle, L, l, epsilon, oj.at("epsilon_prime").get<double>(),
            oj.at("perturbation_size").get<double>(), oj.value("trials", 100), params, horizon,
            ctx.seed, ctx.budget);
        j["openness"] = to_json(probe);
        if (!probe.passed) ctx.soft_failures.push_back("openness probe failed");
    }
    write_json(ctx, "avalanche.json", j);
}

void run_spectrum(const json& config, RunContext& ctx) {
    const SubshiftSpec spec = spec_from_config(config);
    const LayeredSamplingFunction f = sampling_from_config(config);

    if (config.contains("scan")) {
        const auto& sj = config.at("scan");
        spectrum::EnergyGrid grid{sj.at("grid").at("min").get<double>(),
                                  sj.at("grid").at("max").get<double>(),
                                  sj.at("grid").at("step").get<double>()};
        spectrum::ScanParams params;
        params.horizon = sj.value("horizon", params.horizon);
        params.epsilon = sj.value("epsilon", params.epsilon);
        params.uh_margin = sj.value("uh_margin", params.uh_margin);
        params.uh_block_max = sj.value("uh_block_max", params.uh_block_max);
        params.threads = ctx.threads;
        const spectrum::SpectrumEstimate estimate =
            spectrum::scan_spectrum(f, spec, grid, params, ctx.budget);
        for (const auto& e : estimate.energies)
            if (e.budget_degraded)
                ctx.soft_failures.push_back("energy " + format_double(e.energy) +
                                            " degraded to candidate (budget)");
        write_file(ctx, "energies.csv", energies_csv(estimate));
        write_json(ctx, "estimate.json", to_json(estimate));
    }

    if (config.contains("approximants")) {
        const auto& aj = config.at("approximants");
        const std::vector<spectrum::ApproximantLevel> levels = spectrum::approximant_sequence(
            f, spec, aj.at("levels").get<int>(), aj.value("resolution", 0.0), ctx.budget);
        write_file(ctx, "bands.csv", bands_csv(levels));
        write_json(ctx, "approximants.json", to_json(levels));
    }

    if (config.contains("semicontinuity")) {
        const auto& sj = config.at("semicontinuity");
        const LayeredSamplingFunction g = sampling_from_json(sj.at("g"));
        const spectrum::SemicontinuityReport report = spectrum::semicontinuity_probe(
            f, g, spec, sj.at("level").get<int>(), sj.value("resolution", 0.0), ctx.budget);
        write_json(ctx, "semicontinuity.json", to_json(report));
        if (!report.inside) ctx.soft_failures.push_back("semicontinuity violation detected");
    }
}

void run_approximate(const json& config, RunContext& ctx) {
    if (!config.contains("family")) throw ConfigError("approximate needs a `family` document");
    const auto& fj = config.at("family");
    const std::string kind = fj.at("kind").get<std::string>();
    const SubshiftSpec spec = spec_from_config(config);
    const double j_min = config.at("interval").at(0).get<double>();
    const double j_max = config.at("interval").at(1).get<double>();

    std::optional<CocycleFamily> family;
    if (kind == "rotation") {
        family = CocycleFamily::rotation_test(spec, j_min, j_max);
    } else if (kind == "schrodinger") {
        family = CocycleFamily::schrodinger(sampling_from_json(fj.at("sampling")), spec, j_min,
                                            j_max);
    } else {
        throw ConfigError("unknown family kind \"" + kind + "\"");
    }

    const approximation::ApproximationResult result = approximation::approximate_family(
        *family, j_min, j_max, config.at("epsilon").get<double>(),
        config.value("initial_cover", 9), config.value("max_cover", 4097),
        config.value("verify_per_cell", 8), ctx.budget);
    write_json(ctx, "approximation.json", to_json(result));
}

void run_construct(const json& config, RunContext& ctx) {
    const SubshiftSpec spec = spec_from_config(config);
    const LayeredSamplingFunction g0 = sampling_from_config(config, "g0");
    if (!config.contains("generators")) throw ConfigError("construct needs `generators`");
    std::vector<LayeredSamplingFunction> generators;
    for (const auto& gj : config.at("generators")) generators.push_back(sampling_from_json(gj));

    approximation::ConstructionParams params;
    params.epsilons = config.at("epsilons").get<std::vector<double>>();
    params.horizon = config.value("horizon", params.horizon);
    if (config.contains("grid")) {
        params.grid_min = config.at("grid").at("min").get<double>();
        params.grid_max = config.at("grid").at("max").get<double>();
        params.grid_count = config.at("grid").value("count", params.grid_count);
    }
    params.trials = config.value("trials", params.trials);
    params.delta_min = config.value("delta_min", params.delta_min);
    params.seed = ctx.seed;
    params.threads = ctx.threads;

    const approximation::ConstructionResult result =
        approximation::construct_uniform_potential(g0, generators, spec, params, ctx.budget);
    if (!result.completed) ctx.soft_failures.push_back("construction stopped early");
    write_json(ctx, "construction.json", to_json(result));
    write_json(ctx, "function.json", to_json(result.function));
}

}  // namespace

Budget budget_from_environment() {
    Budget budget;
    if (const char* env = std::getenv("COCYCLE_LAB_BUDGET")) {
        try {
            budget.enumeration_steps = std::stoll(env);
        } catch (...) {
            throw ConfigError("COCYCLE_LAB_BUDGET is not an integer");
        }
    }
    return budget;
}

int run(const Options& options) {
    const auto start = std::chrono::steady_clock::now();
    RunContext ctx;
    try {
        const json config = load_config(options.config_path);

        ctx.out_dir = options.out_dir;
        fs::create_directories(ctx.out_dir);
        ctx.budget = budget_from_environment();
        if (config.contains("budget"))
            ctx.budget.enumeration_steps = config.at("budget").get<std::int64_t>();
        if (options.budget_steps) ctx.budget.enumeration_steps = *options.budget_steps;
        ctx.seed = config.value("seed", std::uint64_t{42});
        if (options.seed) ctx.seed = *options.seed;
        ctx.threads = options.threads;

        if (options.command == "subshift")
            run_subshift(config, options, ctx);
        else if (options.command == "exponent")
            run_exponent(config, ctx);
        else if (options.command == "uh")
            run_uh(config, ctx);
        else if (options.command == "avalanche")
            run_avalanche(config, ctx);
        else if (options.command == "spectrum")
            run_spectrum(config, ctx);
        else if (options.command == "approximate")
            run_approximate(config, ctx);
        else if (options.command == "construct")
            run_construct(config, ctx);
        else
            throw ConfigError("unknown command \"" + options.command + "\"");

        const double wall = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        ctx.manifest["command"] = options.command;
        ctx.manifest["config"] = config;
        ctx.manifest["seed"] = ctx.seed;
        ctx.manifest["threads"] = ctx.threads;
        ctx.manifest["budget_steps"] = ctx.budget.enumeration_steps;
        ctx.manifest["version"] = kVersion;
        ctx.manifest["wall_time_s"] = wall;
        ctx.manifest["outputs"] = ctx.outputs;
        ctx.manifest["soft_failures"] = ctx.soft_failures;
        write_json(ctx, "run.json", ctx.manifest);
        return kExitOk;
    } catch (const BudgetError& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitBudgetExhausted;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

}  // namespace cocyclelab::cli
