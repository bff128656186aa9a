#include <CLI11.hpp>

#include "cocyclelab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cocycle-lab: numerics for SL(2,R) cocycles over subshifts"};
    app.require_subcommand(1);

    cocyclelab::cli::Options options;
    std::uint64_t seed = 0;
    std::int64_t budget = 0;
    long factors = 0, prefix = 0, boshernitzan = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", options.config_path, "JSON config file")->required();
        cmd->add_option("--out", options.out_dir, "output directory");
        cmd->add_option("--threads", options.threads, "worker thread cap");
        cmd->add_option("--seed", seed, "seed override");
        cmd->add_option("--budget", budget, "enumeration budget override (steps)");
        return cmd;
    };

    CLI::App* subshift = add_common(app.add_subcommand(
        "subshift", "prefixes, factor sets, frequencies, Boshernitzan profile"));
    subshift->add_option("--factors", factors, "emit the factor set at this length");
    subshift->add_option("--prefix", prefix, "emit a canonical prefix of this length");
    subshift->add_option("--boshernitzan", boshernitzan, "emit the profile up to this n");

    add_common(app.add_subcommand("exponent", "exponent and variation traces"));
    add_common(app.add_subcommand("uh", "uniform hyperbolicity certificate and splitting"));
    add_common(app.add_subcommand("avalanche", "block-product band certificate"));
    add_common(app.add_subcommand(
        "spectrum", "spectrum scan, periodic approximants, semicontinuity probe"));
    add_common(app.add_subcommand("approximate", "locally constant family approximation"));
    add_common(app.add_subcommand("construct", "iterative uniform potential construction"));

    CLI11_PARSE(app, argc, argv);

    CLI::App* active = app.get_subcommands().front();
    options.command = active->get_name();
    if (active->count("--seed")) options.seed = seed;
    if (active->count("--budget")) options.budget_steps = budget;
    if (options.command == "subshift") {
        if (subshift->count("--factors")) options.factors_length = factors;
        if (subshift->count("--prefix")) options.prefix_length = prefix;
        if (subshift->count("--boshernitzan")) options.boshernitzan_n_max = boshernitzan;
    }

    return cocyclelab::cli::run(options);
}
