#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "approxmul/mulcore.hpp"

namespace approxmul {

/// Product term over up to 32 inputs. Input i is a literal when bit i of
/// `care` is set; it is positive when bit i of `value` is also set.
/// Input i corresponds to bit i of the truth-table index (a << wb) | b.
struct Cube {
  std::uint32_t care = 0;
  std::uint32_t value = 0;

  bool covers(std::uint32_t input) const noexcept { return (input & care) == value; }
  unsigned literal_count() const noexcept;
  auto operator<=>(const Cube&) const = default;
};

/// Parses a cube written most-significant input first, e.g. "-01-1-".
Cube parse_cube(std::string_view text);
std::string format_cube(const Cube& cube, unsigned num_inputs);

/// Sum-of-products cover of one output bit. An empty cube list is constant 0.
struct SopCover {
  unsigned num_inputs = 0;
  unsigned output_index = 0;
  std::vector<Cube> cubes;

  bool eval(std::uint32_t input) const noexcept;
  bool is_constant_zero() const noexcept { return cubes.empty(); }
  bool is_constant_one() const noexcept;
  unsigned literal_count() const noexcept;

  bool operator==(const SopCover&) const = default;
};

inline constexpr unsigned kMaxMinimizeInputs = 12;
/// Exact cover selection below this many primes, greedy above.
inline constexpr std::size_t kExactCoverPrimeLimit = 64;

/// Quine-McCluskey primes plus minimum cover (fewest cubes, then fewest literals).
SopCover minimize_column(const std::vector<bool>& column, unsigned num_inputs, unsigned output_index);
SopCover minimize(const TruthTable& table, unsigned output_index);
std::vector<SopCover> minimize_all(const TruthTable& table);

struct EquivalenceResult {
  bool equivalent = true;
  std::optional<std::uint32_t> counterexample;
};

EquivalenceResult verify_equivalence(const SopCover& cover, const TruthTable& table, unsigned output_index);

struct CostEstimate {
  unsigned literal_count = 0;
  unsigned cube_count = 0;
  unsigned two_level_depth = 0;
  unsigned output_count = 0;

  bool operator==(const CostEstimate&) const = default;
};

CostEstimate cost_estimate(std::span<const SopCover> covers);

struct NetlistOptions {
  unsigned width_a = 3;
  unsigned width_b = 3;
  /// Emitted as `//` lines above the module.
  std::vector<std::string> comments;
};

/// Structural Verilog: inputs a, b; output o; one `assign` per output bit.
std::string emit_verilog(const std::string& name, std::span<const SopCover> covers,
                         const NetlistOptions& options);

struct ParsedNetlist {
  std::string name;
  unsigned width_a = 0;
  unsigned width_b = 0;
  std::vector<SopCover> covers;
};

/// Reads back the subset produced by emit_verilog.
ParsedNetlist parse_verilog(const std::string& text);

struct PlaFile {
  unsigned width_a = 0;
  unsigned width_b = 0;
  std::vector<SopCover> covers;

  bool operator==(const PlaFile&) const = default;
};

/// Multi-output PLA (`.i/.o/.ilb/.ob/.p`, one cube per line, `.e`).
std::string write_pla(const PlaFile& pla);
PlaFile read_pla(const std::string& text);

/// Covers transcribed term by term from the published mul3x3_1 equations.
std::vector<SopCover> published_331_covers();

}  // namespace approxmul
