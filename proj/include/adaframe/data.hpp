#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "adaframe/binary_io.hpp"
#include "adaframe/memory.hpp"

namespace adaframe {

/// Ground-truth location of the planted signal. Diagnostics only: never shown
/// to the agent and not part of the on-disk format.
struct SignalWindow {
  std::size_t begin = 0;
  std::size_t length = 0;

  bool contains(std::size_t frame) const { return frame >= begin && frame < begin + length; }
  friend bool operator==(const SignalWindow&, const SignalWindow&) = default;
};

struct FeatureSequence {
  std::uint32_t id = 0;
  std::uint32_t label = 0;
  Matrix features;      // T x D_full, one frame per row
  GlobalMemory memory;  // T_d x D_mem
  std::optional<SignalWindow> window;

  std::size_t frame_count() const { return static_cast<std::size_t>(features.rows()); }
  Vector frame(std::size_t t) const { return features.row(static_cast<Eigen::Index>(t)).transpose(); }
};

struct Dataset {
  std::uint32_t num_classes = 0;
  std::vector<FeatureSequence> sequences;

  std::size_t size() const { return sequences.size(); }
  Eigen::Index feature_dim() const;
  Eigen::Index memory_dim() const;
};

struct SyntheticSpec {
  std::uint32_t num_classes = 5;
  std::size_t length = 64;           // T
  Eigen::Index feature_dim = 16;     // D_full
  Eigen::Index memory_dim = 8;       // D_mem
  std::size_t memory_slots = 16;     // T_d
  std::size_t signal_window = 4;
  double signal_strength = 3.0;
  double noise_stddev = 1.0;
  double memory_noise_stddev = 0.1;
  double projection_scale = 1.0;     // entries ~ N(0, scale^2 / D_full)
  std::uint64_t seed = 0;

  void validate() const;
};

/// Class prototypes (C x D_full), each of norm `signal_strength`.
Matrix class_prototypes(const SyntheticSpec& spec);

/// Memory projection (D_mem x D_full).
Matrix memory_projection(const SyntheticSpec& spec);

Dataset generate(const SyntheticSpec& spec, std::size_t n_videos);

/// Temporally uniform slot indices floor(j * T / T_d).
std::vector<std::size_t> memory_indices(std::size_t frame_count, std::size_t slots);

/// Projects the frames at memory_indices() to D_mem and adds N(0, noise^2).
GlobalMemory derive_memory(const Matrix& features, std::size_t slots, const Matrix& projection,
                           double noise_stddev, Rng& rng);

// AFV1 layout (little-endian):
//   "AFV1" | u32 version = 1 | u32 n_videos | u32 num_classes
//   per video: u32 id | u32 label | u32 T | u32 D_full | u32 T_d | u32 D_mem
//              T x D_full f32 (row-major) | T_d x D_mem f32
inline constexpr std::uint32_t kDatasetVersion = 1;

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset);
Dataset decode_dataset(std::span<const std::uint8_t> bytes);

void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace adaframe
