#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cocyclelab/budget.hpp"

namespace cocyclelab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBudgetExhausted = 3;

struct Options {
    std::string command;      // subshift | exponent | uh | avalanche | spectrum |
                              // approximate | construct
    std::string config_path;
    std::string out_dir = ".";
    int threads = 1;
    std::optional<std::uint64_t> seed;         // overrides the config seed
    std::optional<std::int64_t> budget_steps;  // overrides the enumeration budget

    // subshift conveniences
    std::optional<long> factors_length;
    std::optional<long> prefix_length;
    std::optional<long> boshernitzan_n_max;
};

// Runs one command against a JSON config, emits CSV/JSON artifacts plus a
// run.json manifest into out_dir, and returns the exit code.  Soft per-item
// failures are recorded in the manifest, not fatal.
int run(const Options& options);

// Budget with the COCYCLE_LAB_BUDGET environment override applied.
Budget budget_from_environment();

}  // namespace cocyclelab::cli
