#include <algorithm>
#include <bit>
#include <unordered_set>

#include "approxmul/error.hpp"
#include "approxmul/logicsynth.hpp"

namespace approxmul {
namespace {

using Bits = std::vector<std::uint64_t>;

bool test(const Bits& b, std::size_t i) { return (b[i >> 6] >> (i & 63)) & 1U; }
void set(Bits& b, std::size_t i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }
bool any(const Bits& b) {
  return std::any_of(b.begin(), b.end(), [](std::uint64_t w) { return w != 0; });
}
void subtract(Bits& from, const Bits& what) {
  for (std::size_t i = 0; i < from.size(); ++i) from[i] &= ~what[i];
}
bool intersects(const Bits& x, const Bits& y) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] & y[i]) return true;
  return false;
}

std::uint64_t key(const Cube& c) { return (std::uint64_t{c.care} << 32) | c.value; }

std::vector<Cube> prime_implicants(const std::vector<std::uint32_t>& minterms, unsigned n) {
  const std::uint32_t full = n == 32 ? ~0U : ((1U << n) - 1U);
  std::vector<Cube> level;
  level.reserve(minterms.size());
  for (auto m : minterms) level.push_back({full, m});

  std::vector<Cube> primes;
  while (!level.empty()) {
    std::unordered_set<std::uint64_t> present;
    for (const auto& c : level) present.insert(key(c));
    std::unordered_set<std::uint64_t> combined;
    std::unordered_set<std::uint64_t> next_keys;
    std::vector<Cube> next;
    for (const auto& c : level) {
      for (unsigned i = 0; i < n; ++i) {
        const std::uint32_t bit = 1U << i;
        if (!(c.care & bit) || (c.value & bit)) continue;
        const Cube partner{c.care, c.value | bit};
        if (!present.count(key(partner))) continue;
        combined.insert(key(c));
        combined.insert(key(partner));
        const Cube merged{c.care & ~bit, c.value};
        if (next_keys.insert(key(merged)).second) next.push_back(merged);
      }
    }
    for (const auto& c : level)
      if (!combined.count(key(c))) primes.push_back(c);
    level = std::move(next);
  }
  std::sort(primes.begin(), primes.end());
  return primes;
}

struct Cost {
  std::size_t cubes = 0;
  std::size_t literals = 0;
  auto operator<=>(const Cost&) const = default;
};

class CoverSolver {
 public:
  CoverSolver(const std::vector<Cube>& primes, const std::vector<Bits>& rows, std::size_t num_minterms)
      : primes_(primes), rows_(rows), num_minterms_(num_minterms) {}

  std::vector<std::size_t> greedy(Bits uncovered) const {
    std::vector<std::size_t> chosen;
    while (any(uncovered)) {
      std::size_t best = primes_.size();
      std::size_t best_gain = 0;
      for (std::size_t p = 0; p < primes_.size(); ++p) {
        std::size_t gain = 0;
        for (std::size_t w = 0; w < uncovered.size(); ++w) gain += std::popcount(uncovered[w] & rows_[p][w]);
        if (gain > best_gain ||
            (gain == best_gain && gain > 0 && primes_[p].literal_count() < primes_[best].literal_count())) {
          best = p;
          best_gain = gain;
        }
      }
      if (best == primes_.size()) throw ConsistencyError("minimize: primes do not cover the on-set");
      chosen.push_back(best);
      subtract(uncovered, rows_[best]);
    }
    return chosen;
  }

  std::vector<std::size_t> exact(const Bits& uncovered, std::vector<std::size_t> seed) {
    best_ = std::move(seed);
    best_cost_ = cost_of(best_);
    std::vector<std::size_t> chosen;
    search(uncovered, chosen, Cost{});
    return best_;
  }

 private:
  Cost cost_of(const std::vector<std::size_t>& sel) const {
    Cost c{sel.size(), 0};
    for (auto p : sel) c.literals += primes_[p].literal_count();
    return c;
  }

  void search(const Bits& uncovered, std::vector<std::size_t>& chosen, Cost cost) {
    if (++nodes_ > kNodeBudget) return;
    if (!any(uncovered)) {
      if (cost < best_cost_) {
        best_cost_ = cost;
        best_ = chosen;
      }
      return;
    }
    if (!(Cost{cost.cubes + 1, cost.literals} < best_cost_)) return;

    // Branch on the uncovered minterm with the fewest candidate primes.
    std::size_t pick = num_minterms_;
    std::size_t pick_count = primes_.size() + 1;
    for (std::size_t m = 0; m < num_minterms_; ++m) {
      if (!test(uncovered, m)) continue;
      std::size_t c = 0;
      for (std::size_t p = 0; p < primes_.size(); ++p) c += test(rows_[p], m) ? 1 : 0;
      if (c < pick_count) {
        pick_count = c;
        pick = m;
      }
    }
    std::vector<std::size_t> candidates;
    for (std::size_t p = 0; p < primes_.size(); ++p)
      if (test(rows_[p], pick)) candidates.push_back(p);
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t x, std::size_t y) {
      return primes_[x].literal_count() < primes_[y].literal_count();
    });
    for (auto p : candidates) {
      const Cost next{cost.cubes + 1, cost.literals + primes_[p].literal_count()};
      if (!(next < best_cost_)) continue;
      Bits rest = uncovered;
      subtract(rest, rows_[p]);
      chosen.push_back(p);
      search(rest, chosen, next);
      chosen.pop_back();
    }
  }

  static constexpr std::size_t kNodeBudget = 5'000'000;
  const std::vector<Cube>& primes_;
  const std::vector<Bits>& rows_;
  std::size_t num_minterms_;
  std::vector<std::size_t> best_;
  Cost best_cost_;
  std::size_t nodes_ = 0;
};

}  // namespace

unsigned Cube::literal_count() const noexcept { return static_cast<unsigned>(std::popcount(care)); }

Cube parse_cube(std::string_view text) {
  if (text.empty() || text.size() > 32) throw FormatError("cube: bad length");
  Cube c;
  const unsigned n = static_cast<unsigned>(text.size());
  for (unsigned k = 0; k < n; ++k) {
    const unsigned i = n - 1 - k;
    switch (text[k]) {
      case '1': c.care |= 1U << i; c.value |= 1U << i; break;
      case '0': c.care |= 1U << i; break;
      case '-': break;
      default: throw FormatError(std::string("cube: bad literal `") + text[k] + "`");
    }
  }
  return c;
}

std::string format_cube(const Cube& cube, unsigned num_inputs) {
  std::string s;
  for (unsigned k = 0; k < num_inputs; ++k) {
    const unsigned i = num_inputs - 1 - k;
    const std::uint32_t bit = 1U << i;
    s += (cube.care & bit) ? ((cube.value & bit) ? '1' : '0') : '-';
  }
  return s;
}

bool SopCover::eval(std::uint32_t input) const noexcept {
  return std::any_of(cubes.begin(), cubes.end(), [&](const Cube& c) { return c.covers(input); });
}

bool SopCover::is_constant_one() const noexcept {
  return std::any_of(cubes.begin(), cubes.end(), [](const Cube& c) { return c.care == 0; });
}

unsigned SopCover::literal_count() const noexcept {
  unsigned n = 0;
  for (const auto& c : cubes) n += c.literal_count();
  return n;
}

SopCover minimize_column(const std::vector<bool>& column, unsigned num_inputs, unsigned output_index) {
  if (num_inputs > kMaxMinimizeInputs)
    throw DomainError("minimize: " + std::to_string(num_inputs) + " inputs exceeds cap of " +
                      std::to_string(kMaxMinimizeInputs));
  if (column.size() != (std::size_t{1} << num_inputs)) throw DomainError("minimize: column size mismatch");

  SopCover cover{num_inputs, output_index, {}};
  std::vector<std::uint32_t> minterms;
  for (std::uint32_t i = 0; i < column.size(); ++i)
    if (column[i]) minterms.push_back(i);
  if (minterms.empty()) return cover;
  if (minterms.size() == column.size()) {
    cover.cubes.push_back(Cube{});
    return cover;
  }

  const auto primes = prime_implicants(minterms, num_inputs);
  const std::size_t words = (minterms.size() + 63) / 64;
  std::vector<Bits> rows(primes.size(), Bits(words, 0));
  for (std::size_t p = 0; p < primes.size(); ++p)
    for (std::size_t m = 0; m < minterms.size(); ++m)
      if (primes[p].covers(minterms[m])) set(rows[p], m);

  Bits uncovered(words, 0);
  for (std::size_t m = 0; m < minterms.size(); ++m) set(uncovered, m);

  // Essential primes.
  std::vector<std::size_t> selected;
  std::vector<bool> taken(primes.size(), false);
  for (std::size_t m = 0; m < minterms.size(); ++m) {
    std::size_t only = primes.size();
    std::size_t count = 0;
    for (std::size_t p = 0; p < primes.size(); ++p)
      if (test(rows[p], m)) {
        ++count;
        only = p;
      }
    if (count == 1 && !taken[only]) {
      taken[only] = true;
      selected.push_back(only);
    }
  }
  for (auto p : selected) subtract(uncovered, rows[p]);

  if (any(uncovered)) {
    std::vector<Cube> rest_primes;
    std::vector<Bits> rest_rows;
    std::vector<std::size_t> index;
    for (std::size_t p = 0; p < primes.size(); ++p)
      if (!taken[p] && intersects(rows[p], uncovered)) {
        rest_primes.push_back(primes[p]);
        rest_rows.push_back(rows[p]);
        index.push_back(p);
      }
    CoverSolver solver(rest_primes, rest_rows, minterms.size());
    auto pick = solver.greedy(uncovered);
    if (primes.size() <= kExactCoverPrimeLimit) pick = solver.exact(uncovered, pick);
    for (auto p : pick) selected.push_back(index[p]);
  }

  for (auto p : selected) cover.cubes.push_back(primes[p]);
  std::sort(cover.cubes.begin(), cover.cubes.end());
  return cover;
}

SopCover minimize(const TruthTable& table, unsigned output_index) {
  if (table.num_inputs() > kMaxMinimizeInputs)
    throw DomainError("minimize: " + std::to_string(table.num_inputs()) + " inputs exceeds cap of " +
                      std::to_string(kMaxMinimizeInputs));
  return minimize_column(table.column(output_index), table.num_inputs(), output_index);
}

std::vector<SopCover> minimize_all(const TruthTable& table) {
  std::vector<SopCover> covers;
  for (unsigned bit = 0; bit < table.out_width(); ++bit) covers.push_back(minimize(table, bit));
  return covers;
}

EquivalenceResult verify_equivalence(const SopCover& cover, const TruthTable& table, unsigned output_index) {
  if (cover.num_inputs != table.num_inputs())
    throw DomainError("verify_equivalence: cover has " + std::to_string(cover.num_inputs) + " inputs, table has " +
                      std::to_string(table.num_inputs()));
  if (output_index >= table.out_width()) throw DomainError("verify_equivalence: output bit out of range");
  for (std::uint32_t i = 0; i < table.size(); ++i) {
    const bool want = (table[i] >> output_index) & 1U;
    if (cover.eval(i) != want) return {false, i};
  }
  return {};
}

CostEstimate cost_estimate(std::span<const SopCover> covers) {
  CostEstimate c;
  c.output_count = static_cast<unsigned>(covers.size());
  bool nonconstant = false;
  for (const auto& cov : covers) {
    c.literal_count += cov.literal_count();
    c.cube_count += static_cast<unsigned>(cov.cubes.size());
    if (!cov.is_constant_zero() && !cov.is_constant_one()) nonconstant = true;
  }
  c.two_level_depth = nonconstant ? 2 : 0;
  return c;
}

std::vector<SopCover> published_331_covers() {
  const std::vector<std::vector<const char*>> terms{
      {"--1--1"},
      {"-01-1-", "-10-1-", "-1--01", "--1-10"},
      {"010-1-", "-1-010", "0011--", "0-110-", "-1-111", "100--1", "1-0-01", "1-10-1", "1-11-0"},
      {"-101--", "011011", "-1-10-", "10--1-", "1-11-1", "1---10"},
      {"-1111-", "1--1--", "11--11"},
  };
  std::vector<SopCover> covers;
  for (unsigned bit = 0; bit < terms.size(); ++bit) {
    SopCover c{6, bit, {}};
    for (const char* t : terms[bit]) c.cubes.push_back(parse_cube(t));
    covers.push_back(std::move(c));
  }
  return covers;
}

}  // namespace approxmul
