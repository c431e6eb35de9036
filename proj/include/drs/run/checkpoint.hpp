#pragma once

#include <span>
#include <string>
#include <vector>

#include "drs/nn/mlp.hpp"

namespace drs::run {

/// One named network in a checkpoint: its shape manifest plus the full
/// flat parameter and optimizer state.
struct CheckpointItem {
  std::string name;
  nn::MlpSpec spec;
  nn::ParamSet params;
};

/// Versioned text format; round-trips doubles exactly (hex floats).
void save_checkpoint(const std::string& path,
                     std::span<const CheckpointItem> items);

/// Throws std::runtime_error on version/shape/corruption problems.
std::vector<CheckpointItem> load_checkpoint(const std::string& path);

/// Lookup + shape verification against the expected spec.
const CheckpointItem& find_item(const std::vector<CheckpointItem>& items,
                                const std::string& name,
                                const nn::MlpSpec& expected);

}  // namespace drs::run
