#include "designs.hpp"

#include "approxmul/error.hpp"

namespace approxmul::cli {

const std::vector<std::string>& design_names() {
  static const std::vector<std::string> names{"exact2",   "exact3",   "exact8",   "mul3x3_1", "mul3x3_2",
                                              "eqn3x3_1", "mul8x8_1", "mul8x8_2", "mul8x8_3"};
  return names;
}

Design find_design(const std::string& name) {
  if (name == "exact2") return {name, exact_model(2), std::nullopt};
  if (name == "exact3") return {name, exact_model(3), std::nullopt};
  if (name == "mul3x3_1") return {name, mul3x3_1_model(), std::nullopt};
  if (name == "mul3x3_2") return {name, mul3x3_2_model(), std::nullopt};
  if (name == "eqn3x3_1") return {name, expressions_331_model(), std::nullopt};
  if (name == "exact8") {
    auto plan = exact_plan();
    return {name, as_model(plan), plan};
  }
  for (int v = 1; v <= 3; ++v)
    if (name == "mul8x8_" + std::to_string(v)) return design_for_variant(v);

  std::string list;
  for (const auto& n : design_names()) list += (list.empty() ? "" : ", ") + n;
  throw UsageError("unknown multiplier '" + name + "'; valid names: " + list);
}

Design design_for_variant(int variant) {
  if (variant < 1 || variant > 3) throw UsageError("--variant must be 1, 2 or 3");
  auto plan = build_plan(variant);
  return {plan.name(), as_model(plan), plan};
}

}  // namespace approxmul::cli
