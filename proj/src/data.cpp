#include "adaframe/data.hpp"

namespace adaframe {

namespace {

double to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

Eigen::Index Dataset::feature_dim() const {
  return sequences.empty() ? 0 : sequences.front().features.cols();
}

Eigen::Index Dataset::memory_dim() const { return sequences.empty() ? 0 : sequences.front().memory.dim(); }

void SyntheticSpec::validate() const {
  if (num_classes < 2) throw std::invalid_argument("SyntheticSpec: need at least two classes");
  if (length < 2 || feature_dim < 1 || memory_dim < 2) {
    throw std::invalid_argument("SyntheticSpec: non-positive dimension");
  }
  if (memory_dim % 2 != 0) throw std::invalid_argument("SyntheticSpec: memory_dim must be even");
  if (memory_slots < 1 || memory_slots >= length) {
    throw std::invalid_argument("SyntheticSpec: need 1 <= memory_slots < length");
  }
  if (signal_window < 1 || signal_window > length) {
    throw std::invalid_argument("SyntheticSpec: signal_window must be in [1, length]");
  }
  if (noise_stddev < 0 || memory_noise_stddev < 0) {
    throw std::invalid_argument("SyntheticSpec: negative noise");
  }
}

Matrix class_prototypes(const SyntheticSpec& spec) {
  Rng rng = Rng(spec.seed).split(0x70);
  Matrix protos(spec.num_classes, spec.feature_dim);
  for (Eigen::Index c = 0; c < protos.rows(); ++c) {
    Vector v = normal_vector(spec.feature_dim, 1.0, rng);
    protos.row(c) = (spec.signal_strength / v.norm()) * v.transpose();
  }
  return protos;
}

Matrix memory_projection(const SyntheticSpec& spec) {
  Rng rng = Rng(spec.seed).split(0x71);
  const double stddev = spec.projection_scale / std::sqrt(static_cast<double>(spec.feature_dim));
  Matrix proj(spec.memory_dim, spec.feature_dim);
  for (Eigen::Index i = 0; i < proj.size(); ++i) proj.data()[i] = gaussian_sample(0.0, stddev, rng);
  return proj;
}

std::vector<std::size_t> memory_indices(std::size_t frame_count, std::size_t slots) {
  if (slots == 0 || slots >= frame_count) {
    throw std::invalid_argument("memory_indices: need 1 <= slots < frame count");
  }
  std::vector<std::size_t> idx(slots);
  for (std::size_t j = 0; j < slots; ++j) idx[j] = j * frame_count / slots;
  return idx;
}

GlobalMemory derive_memory(const Matrix& features, std::size_t slots, const Matrix& projection,
                           double noise_stddev, Rng& rng) {
  require_size("derive_memory: projection input", projection.cols(), features.cols());
  const auto idx = memory_indices(static_cast<std::size_t>(features.rows()), slots);
  Matrix entries(static_cast<Eigen::Index>(slots), projection.rows());
  for (std::size_t j = 0; j < slots; ++j) {
    const Vector projected =
        projection * features.row(static_cast<Eigen::Index>(idx[j])).transpose();
    for (Eigen::Index k = 0; k < entries.cols(); ++k) {
      entries(static_cast<Eigen::Index>(j), k) =
          to_f32(projected(k) + gaussian_sample(0.0, noise_stddev, rng));
    }
  }
  return GlobalMemory(std::move(entries));
}

Dataset generate(const SyntheticSpec& spec, std::size_t n_videos) {
  spec.validate();
  const Matrix protos = class_prototypes(spec);
  const Matrix projection = memory_projection(spec);

  Dataset ds;
  ds.num_classes = spec.num_classes;
  ds.sequences.reserve(n_videos);
  for (std::size_t i = 0; i < n_videos; ++i) {
    Rng rng(spec.seed ^ static_cast<std::uint64_t>(i));
    FeatureSequence seq;
    seq.id = static_cast<std::uint32_t>(i);
    seq.label = static_cast<std::uint32_t>(rng.index(spec.num_classes));
    const SignalWindow window{rng.index(spec.length - spec.signal_window + 1), spec.signal_window};
    seq.window = window;

    seq.features.resize(static_cast<Eigen::Index>(spec.length), spec.feature_dim);
    for (std::size_t t = 0; t < spec.length; ++t) {
      for (Eigen::Index k = 0; k < spec.feature_dim; ++k) {
        double v = gaussian_sample(0.0, spec.noise_stddev, rng);
        if (window.contains(t)) v += protos(seq.label, k);
        seq.features(static_cast<Eigen::Index>(t), k) = to_f32(v);
      }
    }
    seq.memory = derive_memory(seq.features, spec.memory_slots, projection,
                               spec.memory_noise_stddev, rng);
    ds.sequences.push_back(std::move(seq));
  }
  return ds;
}

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset) {
  ByteWriter w;
  w.bytes("AFV1");
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(dataset.sequences.size()));
  w.u32(dataset.num_classes);
  for (const auto& seq : dataset.sequences) {
    w.u32(seq.id);
    w.u32(seq.label);
    w.u32(static_cast<std::uint32_t>(seq.features.rows()));
    w.u32(static_cast<std::uint32_t>(seq.features.cols()));
    w.u32(static_cast<std::uint32_t>(seq.memory.slots()));
    w.u32(static_cast<std::uint32_t>(seq.memory.dim()));
    for (Eigen::Index i = 0; i < seq.features.size(); ++i) {
      w.f32(static_cast<float>(seq.features.data()[i]));
    }
    const Matrix& m = seq.memory.entries();
    for (Eigen::Index i = 0; i < m.size(); ++i) w.f32(static_cast<float>(m.data()[i]));
  }
  return w.buffer();
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("AFV1");
  const std::uint32_t version = r.u32();
  if (version != kDatasetVersion) {
    throw FormatError(FormatErrorCode::version_mismatch, "dataset version " + std::to_string(version));
  }
  const std::uint32_t n_videos = r.u32();
  Dataset ds;
  ds.num_classes = r.u32();

  auto read_block = [&r](std::uint32_t rows, std::uint32_t cols, const char* what) {
    const std::size_t count = std::size_t{rows} * cols;
    r.require(count * 4, what);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < count; ++i) m.data()[i] = static_cast<double>(r.f32());
    return m;
  };

  for (std::uint32_t v = 0; v < n_videos; ++v) {
    FeatureSequence seq;
    seq.id = r.u32();
    seq.label = r.u32();
    const std::uint32_t frames = r.u32();
    const std::uint32_t feature_dim = r.u32();
    const std::uint32_t slots = r.u32();
    const std::uint32_t memory_dim = r.u32();
    if (seq.label >= ds.num_classes) {
      throw FormatError(FormatErrorCode::dim_inconsistent, "label out of range");
    }
    if (frames == 0 || feature_dim == 0) {
      throw FormatError(FormatErrorCode::dim_inconsistent, "empty sequence");
    }
    if (slots > 0 && memory_dim % 2 != 0) {
      throw FormatError(FormatErrorCode::dim_inconsistent, "odd memory dimension");
    }
    if (!ds.sequences.empty()) {
      const auto& first = ds.sequences.front();
      if (feature_dim != first.features.cols() || memory_dim != first.memory.dim()) {
        throw FormatError(FormatErrorCode::dim_inconsistent, "dimensions differ between videos");
      }
    }
    seq.features = read_block(frames, feature_dim, "features");
    seq.memory = GlobalMemory(read_block(slots, memory_dim, "memory"));
    ds.sequences.push_back(std::move(seq));
  }
  if (r.remaining() != 0) {
    throw FormatError(FormatErrorCode::dim_inconsistent, "trailing bytes after dataset");
  }
  return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  write_file_atomic(path, encode_dataset(dataset));
}

Dataset read_dataset(const std::filesystem::path& path) { return decode_dataset(read_file(path)); }

}  // namespace adaframe
