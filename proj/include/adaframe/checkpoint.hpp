#pragma once

#include <filesystem>

#include "adaframe/agent.hpp"
#include "adaframe/binary_io.hpp"

namespace adaframe {

// AFCK layout (little-endian):
//   "AFCK" | u32 version = 1
//   u32 feature_dim | u32 memory_dim | u32 hidden_dim | u32 num_classes | u32 horizon
//   7 x { u32 length | length x f64 } in AgentParameters::blocks() order:
//     lstm_weights, lstm_bias, query_proj, class_weights, class_bias,
//     location_weights, utility_weights
// Matrices are row-major. No trailing bytes are allowed.

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  AgentParameters params;
  std::uint32_t horizon = 0;  // K the model was trained with

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace adaframe
