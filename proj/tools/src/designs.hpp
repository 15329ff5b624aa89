#pragma once

#include <optional>
#include <string>
#include <vector>

#include "approxmul/aggregate.hpp"
#include "approxmul/error.hpp"
#include "approxmul/mulcore.hpp"

namespace approxmul::cli {

/// A named multiplier the tool can enumerate, sweep or synthesize.
struct Design {
  std::string name;
  MultiplierModel model;
  /// Set for 8x8 designs built by aggregation.
  std::optional<AggregationPlan> plan;
};

const std::vector<std::string>& design_names();
/// Throws UsageError listing the valid names.
Design find_design(const std::string& name);
Design design_for_variant(int variant);

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace approxmul::cli
