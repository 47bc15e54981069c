#include "adaframe/checkpoint.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"

namespace adaframe {
namespace {

Checkpoint random_checkpoint(Rng& rng) {
  const AgentDims dims{1 + static_cast<Eigen::Index>(rng.index(8)), 2 * (1 + static_cast<Eigen::Index>(rng.index(3))),
                       1 + static_cast<Eigen::Index>(rng.index(8)), 2 + static_cast<Eigen::Index>(rng.index(4))};
  return Checkpoint{init_params(dims, 1.0, rng), static_cast<std::uint32_t>(1 + rng.index(10))};
}

FormatErrorCode decode_error(std::span<const std::uint8_t> bytes) {
  try {
    decode_checkpoint(bytes);
  } catch (const FormatError& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return FormatErrorCode::io;
}

TEST(Checkpoint, RoundTripIsExact) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Checkpoint c = random_checkpoint(rng);
    const auto bytes = encode_checkpoint(c);
    EXPECT_EQ(bytes.size(), 8 + 20 + 7 * 4 + 8 * static_cast<std::size_t>(parameter_count(c.params.dims)));
    const Checkpoint back = decode_checkpoint(bytes);
    EXPECT_EQ(back, c);
    EXPECT_EQ(encode_checkpoint(back), bytes);
  }
}

TEST(Checkpoint, PreservesNonFiniteBitPatterns) {
  Rng rng(2);
  Checkpoint c = random_checkpoint(rng);
  c.params.utility_weights(0) = -0.0;
  c.params.class_bias(0) = std::numeric_limits<double>::denorm_min();
  const Checkpoint back = decode_checkpoint(encode_checkpoint(c));
  EXPECT_TRUE(std::signbit(back.params.utility_weights(0)));
  EXPECT_EQ(back.params.class_bias(0), std::numeric_limits<double>::denorm_min());
}

TEST(Checkpoint, EveryTruncationIsTyped) {
  Rng rng(3);
  const auto bytes = encode_checkpoint(random_checkpoint(rng));
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    const FormatErrorCode code = decode_error(std::span(bytes).first(n));
    EXPECT_TRUE(code == FormatErrorCode::truncated || (n < 4 && code == FormatErrorCode::bad_magic)) << n;
  }
}

TEST(Checkpoint, CorruptionIsTyped) {
  Rng rng(4);
  const auto good = encode_checkpoint(random_checkpoint(rng));
  auto bad = good;
  bad[3] = 'V';
  EXPECT_EQ(decode_error(bad), FormatErrorCode::bad_magic);
  bad = good;
  bad[4] = 7;
  EXPECT_EQ(decode_error(bad), FormatErrorCode::version_mismatch);
  bad = good;
  bad[8] = 0;
  bad[9] = 0;
  bad[10] = 0;
  bad[11] = 0;  // feature_dim = 0
  EXPECT_EQ(decode_error(bad), FormatErrorCode::dim_inconsistent);
  bad = good;
  bad[28] ^= 1;  // length of the first block
  EXPECT_EQ(decode_error(bad), FormatErrorCode::dim_inconsistent);
  bad = good;
  bad.push_back(0);
  EXPECT_EQ(decode_error(bad), FormatErrorCode::dim_inconsistent);
  bad = good;
  bad[12] = 0xff;
  bad[13] = 0xff;  // huge memory_dim
  const FormatErrorCode code = decode_error(bad);
  EXPECT_TRUE(code == FormatErrorCode::dim_inconsistent || code == FormatErrorCode::truncated);
}

TEST(Checkpoint, RandomHeaderCorruptionNeverCrashes) {
  Rng rng(5);
  const auto good = encode_checkpoint(random_checkpoint(rng));
  for (int trial = 0; trial < 5000; ++trial) {
    auto bad = good;
    for (int flips = 0; flips < 3; ++flips) bad[rng.index(32)] = static_cast<std::uint8_t>(rng.index(256));
    try {
      decode_checkpoint(bad);
    } catch (const FormatError&) {
    }
  }
}

TEST(Checkpoint, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "adaframe_checkpoint_test";
  std::filesystem::create_directories(dir);
  Rng rng(6);
  const Checkpoint c = random_checkpoint(rng);
  write_checkpoint(dir / "m.afck", c);
  EXPECT_EQ(read_checkpoint(dir / "m.afck"), c);
  EXPECT_FALSE(std::filesystem::exists(dir / "m.afck.tmp"));
  EXPECT_THROW(read_checkpoint(dir / "missing.afck"), FormatError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace adaframe
