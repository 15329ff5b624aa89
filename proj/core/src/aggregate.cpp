#include "approxmul/aggregate.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "approxmul/error.hpp"

namespace approxmul {
namespace {

constexpr char kLutMagic[8] = {'A', 'M', 'L', 'U', 'T', '1', '\0', '\0'};

std::uint32_t extract(std::uint32_t v, const SegmentRange& r) {
  return (v >> r.offset) & ((1U << r.width) - 1U);
}

void validate_ranges(const std::array<SegmentRange, 3>& segs, const char* operand) {
  std::uint32_t covered = 0;
  for (const auto& r : segs) {
    if (r.width < 2 || r.width > 3 || r.offset + r.width > 8)
      throw DomainError(std::string("segment split: bad segment for operand ") + operand);
    const std::uint32_t bits = ((1U << r.width) - 1U) << r.offset;
    if (covered & bits) throw DomainError(std::string("segment split: overlapping segments on ") + operand);
    covered |= bits;
  }
  if (covered != 0xFFU) throw DomainError(std::string("segment split: bits of ") + operand + " uncovered");
  if (!(segs[0].offset < segs[1].offset && segs[1].offset < segs[2].offset))
    throw DomainError(std::string("segment split: segments of ") + operand + " not ordered low to high");
}

}  // namespace

std::string_view segment_name(Segment s) noexcept {
  switch (s) {
    case Segment::Low: return "low";
    case Segment::Mid: return "mid";
    case Segment::High: return "high";
  }
  return "?";
}

SegmentSplit SegmentSplit::standard() { return from_widths({3, 3, 2}); }

SegmentSplit SegmentSplit::from_widths(std::array<unsigned, 3> low_to_high) {
  SegmentSplit s{};
  unsigned offset = 0;
  for (int i = 0; i < 3; ++i) {
    s.a[i] = {offset, low_to_high[i]};
    s.b[i] = {offset, low_to_high[i]};
    offset += low_to_high[i];
  }
  s.validate();
  return s;
}

void SegmentSplit::validate() const {
  validate_ranges(a, "A");
  validate_ranges(b, "B");
}

std::string SegmentSplit::widths_label() const {
  std::ostringstream os;
  os << "A" << a[2].width << a[1].width << a[0].width << "/B" << b[2].width << b[1].width << b[0].width;
  return os.str();
}

IndexMap default_index_map() {
  IndexMap m{};
  for (unsigned id = 0; id < kNumProducts; ++id)
    m[id] = {static_cast<Segment>(id / 3), static_cast<Segment>(id % 3)};
  return m;
}

std::string describe_index_map(const IndexMap& map) {
  std::ostringstream os;
  for (unsigned id = 0; id < kNumProducts; ++id) {
    if (id) os << ' ';
    os << 'M' << id << "=(A" << segment_name(map[id][0]) << ",B" << segment_name(map[id][1]) << ')';
  }
  return os.str();
}

AggregationPlan::AggregationPlan(std::string name, std::uint8_t variant,
                                 const MultiplierModel& sub_model, const PlanOptions& options)
    : name_(std::move(name)), variant_(variant), split_(options.split), index_map_(options.index_map) {
  split_.validate();
  if (sub_model.width_a() != 3 || sub_model.width_b() != 3)
    throw DomainError("aggregation sub-multiplier must be 3x3, got " + sub_model.name());

  std::array<bool, 9> seen{};
  for (unsigned id = 0; id < kNumProducts; ++id) {
    const auto [sa, sb] = index_map_[id];
    const unsigned pair = static_cast<unsigned>(sa) * 3 + static_cast<unsigned>(sb);
    if (seen[pair]) throw DomainError("index map assigns a segment pair twice");
    seen[pair] = true;

    auto& p = products_[id];
    p.id = id;
    p.seg_a = sa;
    p.seg_b = sb;
    const auto& ra = split_.range_a(sa);
    const auto& rb = split_.range_b(sb);
    p.shift = ra.offset + rb.offset;
    const bool two_by_two = ra.width == 2 && rb.width == 2;
    p.model_name = two_by_two ? "exact2" : sub_model.name();
    for (std::uint32_t x = 0; x < 8; ++x)
      for (std::uint32_t y = 0; y < 8; ++y) {
        std::uint32_t v = 0;
        if (two_by_two) {
          v = (x < 4 && y < 4) ? exact_mul2x2(x, y) : 0;
        } else {
          v = sub_model.eval_unchecked(x, y);
        }
        p.table[(x << 3) | y] = static_cast<std::uint8_t>(v);
      }
  }
}

unsigned AggregationPlan::active_count() const noexcept {
  unsigned n = 0;
  for (unsigned id = 0; id < kNumProducts; ++id) n += is_pruned(id) ? 0 : 1;
  return n;
}

unsigned AggregationPlan::low_low_id() const {
  for (const auto& p : products_)
    if (p.seg_a == Segment::Low && p.seg_b == Segment::Low) return p.id;
  throw ConsistencyError("plan has no low x low product");
}

std::uint32_t AggregationPlan::operator()(std::uint32_t a, std::uint32_t b) const noexcept {
  std::uint32_t sum = 0;
  for (const auto& p : products_) {
    if (is_pruned(p.id)) continue;
    const std::uint32_t x = extract(a, split_.range_a(p.seg_a));
    const std::uint32_t y = extract(b, split_.range_b(p.seg_b));
    sum += static_cast<std::uint32_t>(p.table[(x << 3) | y]) << p.shift;
  }
  return sum;
}

AggregationPlan build_plan(int variant, const PlanOptions& options) {
  switch (variant) {
    case 1: return AggregationPlan("mul8x8_1", 1, mul3x3_1_model(), options);
    case 2: return AggregationPlan("mul8x8_2", 2, mul3x3_2_model(), options);
    case 3: return prune(build_plan(2, options), 2);
    default: throw DomainError("unknown aggregation variant " + std::to_string(variant) + " (expected 1, 2 or 3)");
  }
}

AggregationPlan exact_plan(const PlanOptions& options) {
  return AggregationPlan("exact8", AggregationPlan::kExactVariant, exact_model(3), options);
}

AggregationPlan prune(const AggregationPlan& plan, unsigned id) {
  if (id >= kNumProducts) throw DomainError("prune: no sub-multiplier M" + std::to_string(id));
  if (id == plan.low_low_id()) throw DomainError("prune: refusing to remove the low x low product");
  AggregationPlan out = plan;
  if (out.is_pruned(id)) return out;
  out.pruned_ = static_cast<std::uint16_t>(out.pruned_ | (1U << id));
  const bool is_variant3 = plan.variant_ == 2 && out.pruned_ == (1U << 2);
  out.variant_ = is_variant3 ? 3 : AggregationPlan::kCustomVariant;
  out.name_ = is_variant3 ? "mul8x8_3" : plan.name_ + "-M" + std::to_string(id);
  return out;
}

std::uint32_t aggregate_mul(const AggregationPlan& plan, std::uint32_t a, std::uint32_t b) {
  if (a > 255 || b > 255) throw DomainError("aggregate_mul operands must be 8-bit");
  return plan(a, b);
}

MultiplierModel as_model(const AggregationPlan& plan) {
  return MultiplierModel(plan.name(), 8, 8, Lut16::kOutWidth,
                         [plan](std::uint32_t a, std::uint32_t b) { return plan(a, b); });
}

std::string describe_plan(const AggregationPlan& plan) {
  std::ostringstream os;
  for (const auto& p : plan.products()) {
    os << 'M' << p.id << ' ' << segment_name(p.seg_a) << ' ' << segment_name(p.seg_b) << ' '
       << p.model_name << ' ' << p.shift << ' ' << (plan.is_pruned(p.id) ? 1 : 0) << '\n';
  }
  return os.str();
}

Lut16::Lut16(std::vector<std::uint32_t> entries, std::uint8_t variant, std::uint16_t pruned_mask)
    : entries_(std::move(entries)), variant_(variant), pruned_(pruned_mask) {
  if (entries_.size() != kEntries)
    throw DomainError("LUT must have 65536 entries, got " + std::to_string(entries_.size()));
  for (std::size_t i = 0; i < kEntries; ++i)
    if (entries_[i] >= (1U << kOutWidth)) throw DomainError("LUT entry " + std::to_string(i) + " exceeds 17 bits");
}

Lut16 Lut16::exact() {
  std::vector<std::uint32_t> e(kEntries);
  for (std::uint32_t i = 0; i < kEntries; ++i) e[i] = (i >> 8) * (i & 0xFFU);
  return Lut16(std::move(e), AggregationPlan::kExactVariant);
}

Lut16 Lut16::from_plan(const AggregationPlan& plan) {
  std::vector<std::uint32_t> e(kEntries);
  for (std::uint32_t i = 0; i < kEntries; ++i) e[i] = plan(i >> 8, i & 0xFFU);
  return Lut16(std::move(e), plan.variant(), plan.pruned_mask());
}

bool Lut16::is_exact() const noexcept {
  for (std::uint32_t i = 0; i < kEntries; ++i)
    if (entries_[i] != (i >> 8) * (i & 0xFFU)) return false;
  return true;
}

void Lut16::write(std::ostream& os) const {
  std::array<unsigned char, kHeaderBytes> header{};
  std::memcpy(header.data(), kLutMagic, 8);
  header[8] = 8;
  header[9] = 8;
  header[10] = kOutWidth;
  header[11] = variant_;
  header[12] = static_cast<unsigned char>(pruned_ & 0xFFU);
  header[13] = static_cast<unsigned char>(pruned_ >> 8);
  os.write(reinterpret_cast<const char*>(header.data()), header.size());
  std::vector<unsigned char> body(kEntries * 4);
  for (std::size_t i = 0; i < kEntries; ++i) {
    const std::uint32_t v = entries_[i];
    for (int k = 0; k < 4; ++k) body[4 * i + k] = static_cast<unsigned char>((v >> (8 * k)) & 0xFFU);
  }
  os.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!os) throw FormatError("LUT: write failed");
}

Lut16 Lut16::read(std::istream& is) {
  std::array<unsigned char, kHeaderBytes> header{};
  if (!is.read(reinterpret_cast<char*>(header.data()), header.size()))
    throw FormatError("LUT: truncated header");
  if (std::memcmp(header.data(), kLutMagic, 8) != 0) throw FormatError("LUT: bad magic");
  if (header[8] != 8 || header[9] != 8 || header[10] != kOutWidth)
    throw FormatError("LUT: unsupported widths");
  std::vector<unsigned char> body(kEntries * 4);
  if (!is.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size())))
    throw FormatError("LUT: truncated body at byte offset " +
                      std::to_string(kHeaderBytes + static_cast<std::size_t>(is.gcount())));
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("LUT: trailing bytes after body");
  std::vector<std::uint32_t> e(kEntries);
  for (std::size_t i = 0; i < kEntries; ++i)
    e[i] = std::uint32_t{body[4 * i]} | (std::uint32_t{body[4 * i + 1]} << 8) |
           (std::uint32_t{body[4 * i + 2]} << 16) | (std::uint32_t{body[4 * i + 3]} << 24);
  const auto pruned = static_cast<std::uint16_t>(header[12] | (header[13] << 8));
  try {
    return Lut16(std::move(e), header[11], pruned);
  } catch (const DomainError& err) {
    throw FormatError(std::string("LUT: ") + err.what());
  }
}

void Lut16::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("LUT: cannot open " + path.string() + " for writing");
  write(os);
}

Lut16 Lut16::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("LUT: cannot open " + path.string());
  return read(is);
}

void export_lut16(const AggregationPlan& plan, const std::filesystem::path& path) {
  Lut16::from_plan(plan).save(path);
}

}  // namespace approxmul
