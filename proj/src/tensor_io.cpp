#include "segdecide/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "segdecide/error.hpp"

namespace segdecide {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {0x53, 0x47, 0x54, 0x31};
constexpr std::uint8_t kVersion = 0x01;
constexpr std::size_t kFixedHeader = 8;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t offset) {
  return static_cast<std::uint32_t>(b[offset]) | (static_cast<std::uint32_t>(b[offset + 1]) << 8) |
         (static_cast<std::uint32_t>(b[offset + 2]) << 16) |
         (static_cast<std::uint32_t>(b[offset + 3]) << 24);
}

std::vector<std::uint8_t> header(DType dtype, std::span<const std::uint32_t> dims,
                                 std::size_t payload_bytes) {
  std::vector<std::uint8_t> out;
  out.reserve(kFixedHeader + 4 * dims.size() + payload_bytes);
  for (std::uint8_t b : kMagic) out.push_back(b);
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(dtype));
  out.push_back(static_cast<std::uint8_t>(dims.size()));
  out.push_back(0x00);
  for (std::uint32_t d : dims) put_u32(out, d);
  return out;
}

std::vector<std::uint8_t> encode_f32(std::span<const std::uint32_t> dims,
                                     std::span<const float> values) {
  auto out = header(DType::f32, dims, values.size() * 4);
  for (float v : values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const LabelMap& labels) {
  const std::array<std::uint32_t, 2> dims = {labels.height(), labels.width()};
  auto out = header(DType::u8, dims, labels.pixel_count());
  out.insert(out.end(), labels.data().begin(), labels.data().end());
  return out;
}

std::vector<std::uint8_t> encode_tensor(const ProbabilityMap& probs) {
  const std::array<std::uint32_t, 3> dims = {probs.height(), probs.width(),
                                             static_cast<std::uint32_t>(probs.num_classes())};
  return encode_f32(dims, probs.data());
}

std::vector<std::uint8_t> encode_tensor(const PriorStack& priors) {
  const std::array<std::uint32_t, 3> dims = {priors.height(), priors.width(),
                                             static_cast<std::uint32_t>(priors.num_classes())};
  return encode_f32(dims, priors.data());
}

std::vector<std::uint8_t> encode_tensor(const FeatureMap& features) {
  const std::array<std::uint32_t, 2> dims = {features.height(), features.width()};
  return encode_f32(dims, features.data());
}

RawTensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFixedHeader) {
    throw FormatError("SGT1: file shorter than the fixed header");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("SGT1: bad magic bytes");
  }
  if (bytes[4] != kVersion) {
    throw FormatError("SGT1: unsupported version " + std::to_string(bytes[4]));
  }
  RawTensor raw;
  if (bytes[5] == 0x00) {
    raw.dtype = DType::u8;
  } else if (bytes[5] == 0x01) {
    raw.dtype = DType::f32;
  } else {
    throw FormatError("SGT1: unknown dtype " + std::to_string(bytes[5]));
  }
  const std::size_t ndim = bytes[6];
  if (ndim != 2 && ndim != 3) {
    throw FormatError("SGT1: ndim must be 2 or 3, got " + std::to_string(ndim));
  }
  if (bytes[7] != 0x00) {
    throw FormatError("SGT1: reserved byte is not zero");
  }
  if (bytes.size() < kFixedHeader + 4 * ndim) {
    throw FormatError("SGT1: truncated dimension block");
  }
  std::size_t elements = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    const std::uint32_t d = get_u32(bytes, kFixedHeader + 4 * i);
    raw.dims.push_back(d);
    elements *= d;
  }
  const std::size_t elem_size = raw.dtype == DType::u8 ? 1 : 4;
  const std::size_t offset = kFixedHeader + 4 * ndim;
  const std::size_t payload = bytes.size() - offset;
  if (payload < elements * elem_size) {
    throw FormatError("SGT1: truncated payload (" + std::to_string(payload) + " of " +
                      std::to_string(elements * elem_size) + " bytes)");
  }
  if (payload > elements * elem_size) {
    throw FormatError("SGT1: trailing bytes after payload");
  }
  if (raw.dtype == DType::u8) {
    raw.u8.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
  } else {
    raw.f32.resize(elements);
    for (std::size_t i = 0; i < elements; ++i) {
      raw.f32[i] = std::bit_cast<float>(get_u32(bytes, offset + 4 * i));
    }
  }
  return raw;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoError("parent directory does not exist: " + parent.string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_tensor(const std::filesystem::path& path, const LabelMap& labels) {
  write_bytes(path, encode_tensor(labels));
}
void write_tensor(const std::filesystem::path& path, const ProbabilityMap& probs) {
  write_bytes(path, encode_tensor(probs));
}
void write_tensor(const std::filesystem::path& path, const PriorStack& priors) {
  write_bytes(path, encode_tensor(priors));
}
void write_tensor(const std::filesystem::path& path, const FeatureMap& features) {
  write_bytes(path, encode_tensor(features));
}

RawTensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_tensor(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

LabelMap to_label_map(RawTensor raw, int num_classes) {
  if (raw.dtype != DType::u8 || raw.dims.size() != 2) {
    throw FormatError("expected a 2-D uint8 label map");
  }
  if (num_classes == 0) {
    const auto it = std::max_element(raw.u8.begin(), raw.u8.end());
    num_classes = it == raw.u8.end() ? 1 : *it + 1;
  }
  return LabelMap(raw.dims[0], raw.dims[1], num_classes, std::move(raw.u8));
}

ProbabilityMap to_probability_map(RawTensor raw) {
  if (raw.dtype != DType::f32 || raw.dims.size() != 3) {
    throw FormatError("expected a 3-D float32 probability map");
  }
  return ProbabilityMap(raw.dims[0], raw.dims[1], static_cast<int>(raw.dims[2]),
                        std::move(raw.f32));
}

PriorStack to_prior_stack(RawTensor raw) {
  if (raw.dtype != DType::f32 || raw.dims.size() != 3) {
    throw FormatError("expected a 3-D float32 prior stack");
  }
  const std::size_t n = raw.dims[2];
  bool sums_to_one = n > 0;
  for (std::size_t p = 0; n > 0 && p < raw.f32.size() / n && sums_to_one; ++p) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += raw.f32[p * n + k];
    sums_to_one = std::abs(sum - 1.0) <= kRawPriorSumTolerance;
  }
  if (sums_to_one) {
    return PriorStack(raw.dims[0], raw.dims[1], static_cast<int>(n), std::move(raw.f32), false,
                      0.0f);
  }
  const float cutoff =
      raw.f32.empty() ? 0.0f : *std::min_element(raw.f32.begin(), raw.f32.end());
  return PriorStack(raw.dims[0], raw.dims[1], static_cast<int>(n), std::move(raw.f32), true,
                    cutoff);
}

FeatureMap to_feature_map(RawTensor raw) {
  if (raw.dtype != DType::f32 || raw.dims.size() != 2) {
    throw FormatError("expected a 2-D float32 feature map");
  }
  return FeatureMap(raw.dims[0], raw.dims[1], std::move(raw.f32));
}

namespace {

template <typename F>
auto load(const std::filesystem::path& path, F convert) {
  auto raw = read_tensor(path);
  try {
    return convert(std::move(raw));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(path.string() + ": " + e.what());
  }
}

}  // namespace

LabelMap read_label_map(const std::filesystem::path& path, int num_classes) {
  return load(path, [num_classes](RawTensor r) { return to_label_map(std::move(r), num_classes); });
}
ProbabilityMap read_probability_map(const std::filesystem::path& path) {
  return load(path, [](RawTensor r) { return to_probability_map(std::move(r)); });
}
PriorStack read_prior_stack(const std::filesystem::path& path) {
  return load(path, [](RawTensor r) { return to_prior_stack(std::move(r)); });
}
FeatureMap read_feature_map(const std::filesystem::path& path) {
  return load(path, [](RawTensor r) { return to_feature_map(std::move(r)); });
}

std::vector<std::uint8_t> encode_pgm(std::uint32_t height, std::uint32_t width,
                                     std::span<const std::uint32_t> values,
                                     std::uint32_t max_val) {
  if (max_val < 1 || max_val > 65535) {
    throw ConfigError("PGM max value must lie in [1, 65535], got " + std::to_string(max_val));
  }
  if (values.size() != static_cast<std::size_t>(height) * width) {
    throw ShapeError("PGM: value count does not match the image shape");
  }
  const std::string head = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
                           std::to_string(max_val) + "\n";
  std::vector<std::uint8_t> out(head.begin(), head.end());
  const bool wide = max_val > 255;
  out.reserve(out.size() + values.size() * (wide ? 2 : 1));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t v = values[i];
    if (v > max_val) {
      throw InvariantError("PGM: value " + std::to_string(v) + " at index " + std::to_string(i) +
                           " exceeds max value " + std::to_string(max_val));
    }
    if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, std::uint32_t height, std::uint32_t width,
               std::span<const std::uint32_t> values, std::uint32_t max_val) {
  write_bytes(path, encode_pgm(height, width, values, max_val));
}

}  // namespace segdecide
