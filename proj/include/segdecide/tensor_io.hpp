#pragma once

// SGT1 container:
//
//   offset  size  field
//   0       4     magic "SGT1" (53 47 54 31)
//   4       1     version, 0x01
//   5       1     dtype: 0x00 uint8, 0x01 float32 little-endian
//   6       1     ndim: 2 or 3
//   7       1     reserved, 0x00
//   8       4*nd  dims as little-endian uint32, (H, W[, N])
//   ...           row-major, channel-last payload
//
// Files are written in full or not at all; readers reject trailing bytes.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "segdecide/tensor.hpp"

namespace segdecide {

enum class DType : std::uint8_t { u8 = 0x00, f32 = 0x01 };

/// Decoded but unvalidated SGT1 contents.
struct RawTensor {
  DType dtype = DType::u8;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> u8;
  std::vector<float> f32;
};

std::vector<std::uint8_t> encode_tensor(const LabelMap& labels);
std::vector<std::uint8_t> encode_tensor(const ProbabilityMap& probs);
std::vector<std::uint8_t> encode_tensor(const PriorStack& priors);
std::vector<std::uint8_t> encode_tensor(const FeatureMap& features);

RawTensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, const LabelMap& labels);
void write_tensor(const std::filesystem::path& path, const ProbabilityMap& probs);
void write_tensor(const std::filesystem::path& path, const PriorStack& priors);
void write_tensor(const std::filesystem::path& path, const FeatureMap& features);

RawTensor read_tensor(const std::filesystem::path& path);

/// `num_classes` of 0 infers the class count as max(label) + 1.
LabelMap to_label_map(RawTensor raw, int num_classes = 0);
ProbabilityMap to_probability_map(RawTensor raw);
/// A stack whose pixels all sum to one is loaded as raw; otherwise it is
/// loaded as smoothed with the cutoff set to its smallest value.
PriorStack to_prior_stack(RawTensor raw);
FeatureMap to_feature_map(RawTensor raw);

LabelMap read_label_map(const std::filesystem::path& path, int num_classes = 0);
ProbabilityMap read_probability_map(const std::filesystem::path& path);
PriorStack read_prior_stack(const std::filesystem::path& path);
FeatureMap read_feature_map(const std::filesystem::path& path);

/// Binary PGM (P5). Samples are 8-bit when max_val <= 255, otherwise 16-bit
/// big-endian. Every value must be <= max_val <= 65535.
std::vector<std::uint8_t> encode_pgm(std::uint32_t height, std::uint32_t width,
                                     std::span<const std::uint32_t> values,
                                     std::uint32_t max_val);
void write_pgm(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
               std::span<const std::uint32_t> values, std::uint32_t max_val);

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

}  // namespace segdecide
