#pragma once
// Generated by tests/oracles/gen_oracles.py. Do not edit.

#include <cstdint>

namespace oracle {

struct Metrics {
  std::uint64_t mismatches;
  std::uint64_t ed_sum;
  std::uint64_t max_ed;
  double mred;
  std::uint64_t lut_fnv1a;
};

inline constexpr Metrics kMul331{6, 72, 20, 0.03612383729001805, 0xbd839377598f7265ULL};
inline constexpr Metrics kMul332{6, 32, 8, 0.01715026146513027, 0x18c5d9843c8f4685ULL};
inline constexpr Metrics kMul881{17824, 5971968, 1620, 0.009178464160184861, 0x5335a65b5ad68785ULL};
inline constexpr Metrics kMul882{17824, 2557696, 648, 0.004115049207298403, 0xcadad80e89480e75ULL};
inline constexpr Metrics kMul883{48304, 23434944, 1992, 0.046727997851188474, 0xdd7e43d5f492a23dULL};

}  // namespace oracle
