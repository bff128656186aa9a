#pragma once

#include <cstdint>

namespace cocyclelab {

// Work limits for the exact-enumeration machinery.  `enumeration_steps` caps
// (number of enumerated words) * (product length) per call; the scan and
// prefix limits cap orbit generation.  The CLI exposes `--budget` and the
// COCYCLE_LAB_BUDGET environment variable, both of which override
// `enumeration_steps`.
struct Budget {
    std::int64_t enumeration_steps = 50'000'000;
    std::int64_t max_scan_length = 1 << 22;
    std::int64_t max_prefix_length = 1 << 24;
    std::int64_t max_horizon = 1 << 14;
};

}  // namespace cocyclelab
