#pragma once

#include <filesystem>
#include <optional>

#include "approxmul/dnn/inference.hpp"
#include "approxmul/dnn/lenet.hpp"

namespace approxmul::dnn {

struct Checkpoint {
  LeNetModel model;
  std::optional<Calibration> calibration;
};

/// Writes a JSON manifest at `manifest` and the little-endian float32 tensors,
/// concatenated in manifest order, at the blob path named inside it
/// (`<manifest stem>.bin`, same directory).
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& manifest);
Checkpoint load_checkpoint(const std::filesystem::path& manifest);

}  // namespace approxmul::dnn
