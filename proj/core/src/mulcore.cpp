#include "approxmul/mulcore.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include "approxmul/error.hpp"

namespace approxmul {
namespace {

void check_operand(std::uint32_t v, unsigned width, const char* what) {
  if (width < 32 && v >= (1U << width)) {
    std::ostringstream msg;
    msg << what << " operand " << v << " does not fit in " << width << " bits";
    throw DomainError(msg.str());
  }
}

// Rows of the 3x3 exact table whose product exceeds 31, remapped to 5 bits.
struct ModifiedRow {
  std::uint8_t a, b, value;
};
constexpr std::array<ModifiedRow, 6> kMul331Rows{{
    {5, 7, 27},
    {6, 6, 24},
    {6, 7, 30},
    {7, 5, 27},
    {7, 6, 30},
    {7, 7, 29},
}};

constexpr std::array<std::uint8_t, 64> build_mul331_table() {
  std::array<std::uint8_t, 64> t{};
  for (std::uint32_t a = 0; a < 8; ++a)
    for (std::uint32_t b = 0; b < 8; ++b) t[(a << 3) | b] = static_cast<std::uint8_t>(a * b);
  for (const auto& r : kMul331Rows) t[(r.a << 3) | r.b] = r.value;
  return t;
}
constexpr auto kMul331Table = build_mul331_table();

}  // namespace

TruthTable::TruthTable(unsigned width_a, unsigned width_b, unsigned out_width,
                       std::vector<std::uint32_t> entries)
    : width_a_(width_a), width_b_(width_b), out_width_(out_width), entries_(std::move(entries)) {
  if (width_a + width_b > kMaxEnumerationBits)
    throw DomainError("truth table input width exceeds enumeration cap");
  if (out_width == 0 || out_width > 32) throw DomainError("truth table output width out of range");
  if (entries_.size() != (std::size_t{1} << (width_a + width_b)))
    throw DomainError("truth table has " + std::to_string(entries_.size()) + " entries, expected " +
                      std::to_string(std::size_t{1} << (width_a + width_b)));
  if (out_width < 32) {
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i] >= (1U << out_width))
        throw DomainError("truth table entry " + std::to_string(i) + " exceeds output width");
  }
}

std::uint32_t TruthTable::at(std::uint32_t a, std::uint32_t b) const {
  check_operand(a, width_a_, "first");
  check_operand(b, width_b_, "second");
  return entries_[(static_cast<std::size_t>(a) << width_b_) | b];
}

std::vector<bool> TruthTable::column(unsigned bit) const {
  if (bit >= out_width_) throw DomainError("output bit index out of range");
  std::vector<bool> col(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) col[i] = (entries_[i] >> bit) & 1U;
  return col;
}

void write_truth_table(std::ostream& os, const TruthTable& table) {
  os << "tt " << table.width_a() << ' ' << table.width_b() << ' ' << table.out_width() << '\n';
  for (auto e : table.entries()) os << e << '\n';
}

TruthTable read_truth_table(std::istream& is) {
  std::string tag;
  unsigned wa = 0, wb = 0, wout = 0;
  if (!(is >> tag >> wa >> wb >> wout) || tag != "tt")
    throw FormatError("truth table: expected header `tt <wa> <wb> <wout>`");
  if (wa + wb > kMaxEnumerationBits) throw FormatError("truth table: input width exceeds cap");
  const std::size_t n = std::size_t{1} << (wa + wb);
  std::vector<std::uint32_t> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t v = 0;
    if (!(is >> v)) throw FormatError("truth table: truncated at entry " + std::to_string(i));
    if (v > 0xFFFFFFFFULL) throw FormatError("truth table: entry " + std::to_string(i) + " too large");
    entries.push_back(static_cast<std::uint32_t>(v));
  }
  std::string extra;
  if (is >> extra) throw FormatError("truth table: trailing data after " + std::to_string(n) + " entries");
  try {
    return TruthTable(wa, wb, wout, std::move(entries));
  } catch (const DomainError& e) {
    throw FormatError(std::string("truth table: ") + e.what());
  }
}

MultiplierModel::MultiplierModel(std::string name, unsigned width_a, unsigned width_b,
                                 unsigned out_width, Fn fn)
    : name_(std::move(name)),
      width_a_(width_a),
      width_b_(width_b),
      out_width_(out_width),
      fn_(std::move(fn)) {
  if (width_a == 0 || width_b == 0 || width_a > 16 || width_b > 16)
    throw DomainError("multiplier operand widths must be in 1..16");
}

std::uint32_t MultiplierModel::operator()(std::uint32_t a, std::uint32_t b) const {
  check_operand(a, width_a_, "first");
  check_operand(b, width_b_, "second");
  return fn_(a, b);
}

std::uint32_t exact_mul(std::uint32_t a, std::uint32_t b, unsigned k) {
  if (k == 0 || k > 16) throw DomainError("exact_mul width must be in 1..16");
  check_operand(a, k, "first");
  check_operand(b, k, "second");
  return a * b;
}

std::uint32_t exact_mul2x2(std::uint32_t a, std::uint32_t b) { return exact_mul(a, b, 2); }

std::uint32_t mul3x3_1(std::uint32_t a, std::uint32_t b) {
  check_operand(a, 3, "first");
  check_operand(b, 3, "second");
  return kMul331Table[(a << 3) | b];
}

std::uint32_t mul3x3_2(std::uint32_t a, std::uint32_t b) {
  std::uint32_t v = mul3x3_1(a, b);
  if (predictor_fires(a, b)) v = (v | 0x20U) & ~0x10U;
  return v;
}

std::uint32_t eval_expressions_331(std::uint32_t a, std::uint32_t b) {
  check_operand(a, 3, "first");
  check_operand(b, 3, "second");
  const bool a0 = a & 1, a1 = (a >> 1) & 1, a2 = (a >> 2) & 1;
  const bool b0 = b & 1, b1 = (b >> 1) & 1, b2 = (b >> 2) & 1;

  const bool o0 = a0 && b0;
  const bool o1 = (!a1 && a0 && b1) || (a1 && !a0 && b1) || (a1 && !b1 && b0) || (a0 && b1 && !b0);
  const bool o2 = (!a2 && a1 && !a0 && b1) || (a1 && !b2 && b1 && !b0) ||
                  (!a2 && !a1 && a0 && b2) || (!a2 && a0 && b2 && !b1) ||
                  (a1 && b2 && b1 && b0) || (a2 && !a1 && !a0 && b0) ||
                  (a2 && !a0 && !b1 && b0) || (a2 && a0 && !b2 && b0) ||
                  (a2 && a0 && b2 && !b0);
  const bool o3 = (a1 && !a0 && b2) || (!a2 && a1 && a0 && !b2 && b1 && b0) ||
                  (a1 && b2 && !b1) || (a2 && !a1 && b1) || (a2 && a0 && b2 && b0) ||
                  (a2 && b1 && !b0);
  const bool o4 = (a1 && a0 && b2 && b1) || (a2 && b2) || (a2 && a1 && b1 && b0);
  const bool o5 = false;

  return static_cast<std::uint32_t>(o0) | (static_cast<std::uint32_t>(o1) << 1) |
         (static_cast<std::uint32_t>(o2) << 2) | (static_cast<std::uint32_t>(o3) << 3) |
         (static_cast<std::uint32_t>(o4) << 4) | (static_cast<std::uint32_t>(o5) << 5);
}

MultiplierModel exact_model(unsigned k) {
  if (k == 0 || k > 12) throw DomainError("exact model width must be in 1..12");
  return MultiplierModel("exact" + std::to_string(k), k, k, 2 * k,
                         [](std::uint32_t a, std::uint32_t b) { return a * b; });
}

MultiplierModel mul3x3_1_model() {
  return MultiplierModel("mul3x3_1", 3, 3, 5,
                         [](std::uint32_t a, std::uint32_t b) { return kMul331Table[(a << 3) | b]; });
}

MultiplierModel mul3x3_2_model() {
  return MultiplierModel("mul3x3_2", 3, 3, 6, [](std::uint32_t a, std::uint32_t b) {
    std::uint32_t v = kMul331Table[(a << 3) | b];
    return predictor_fires(a, b) ? ((v | 0x20U) & ~0x10U) : v;
  });
}

MultiplierModel expressions_331_model() {
  return MultiplierModel("eqn3x3_1", 3, 3, 5, &eval_expressions_331);
}

TruthTable enumerate_table(const MultiplierModel& model) {
  const unsigned bits = model.width_a() + model.width_b();
  if (bits > kMaxEnumerationBits)
    throw DomainError("enumerate_table: " + std::to_string(bits) + " input bits exceeds cap of " +
                      std::to_string(kMaxEnumerationBits));
  std::vector<std::uint32_t> entries(std::size_t{1} << bits);
  const std::uint32_t na = 1U << model.width_a();
  const std::uint32_t nb = 1U << model.width_b();
  for (std::uint32_t a = 0; a < na; ++a)
    for (std::uint32_t b = 0; b < nb; ++b)
      entries[(static_cast<std::size_t>(a) << model.width_b()) | b] = model.eval_unchecked(a, b);
  return TruthTable(model.width_a(), model.width_b(), model.out_width(), std::move(entries));
}

const std::vector<PublishedRowNote>& mul3x3_2_row_notes() {
  static const std::vector<PublishedRowNote> notes{
      {7, 6, 38, 46,
       "mul3x3_2(7,6): published row value 38 disagrees with its output bits 101110 (46); "
       "46 follows the predictor rule applied to mul3x3_1(7,6)=30 and is used"},
  };
  return notes;
}

}  // namespace approxmul
