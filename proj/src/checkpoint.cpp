#include "adaframe/checkpoint.hpp"

namespace adaframe {

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint) {
  const AgentParameters& p = checkpoint.params;
  p.check_shapes();
  ByteWriter w;
  w.bytes("AFCK");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(p.dims.feature_dim));
  w.u32(static_cast<std::uint32_t>(p.dims.memory_dim));
  w.u32(static_cast<std::uint32_t>(p.dims.hidden_dim));
  w.u32(static_cast<std::uint32_t>(p.dims.num_classes));
  w.u32(checkpoint.horizon);
  for (const auto& block : p.blocks()) {
    w.u32(static_cast<std::uint32_t>(block.values.size()));
    for (double v : block.values) w.f64(v);
  }
  return w.buffer();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("AFCK");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError(FormatErrorCode::version_mismatch, "checkpoint version " + std::to_string(version));
  }
  AgentDims dims;
  dims.feature_dim = r.u32();
  dims.memory_dim = r.u32();
  dims.hidden_dim = r.u32();
  dims.num_classes = r.u32();
  Checkpoint out;
  out.horizon = r.u32();
  try {
    dims.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(FormatErrorCode::dim_inconsistent, e.what());
  }
  // Guard the allocation below against absurd headers.
  if (parameter_count(dims) * sizeof(double) > r.remaining()) {
    throw FormatError(FormatErrorCode::truncated, "checkpoint shorter than its dims require");
  }
  out.params = AgentParameters::zeros(dims);
  for (auto& block : out.params.blocks()) {
    const std::uint32_t length = r.u32();
    if (length != block.values.size()) {
      throw FormatError(FormatErrorCode::dim_inconsistent,
                        std::string(block.name) + " has length " + std::to_string(length) +
                            ", expected " + std::to_string(block.values.size()));
    }
    r.require(std::size_t{length} * 8, "parameter block");
    for (double& v : block.values) v = r.f64();
  }
  if (r.remaining() != 0) {
    throw FormatError(FormatErrorCode::dim_inconsistent, "trailing bytes after checkpoint");
  }
  return out;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file_atomic(path, encode_checkpoint(checkpoint));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

}  // namespace adaframe
