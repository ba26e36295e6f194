#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "segdecide/error.hpp"
#include "segdecide/tensor_io.hpp"
#include "support.hpp"

using namespace segdecide;

namespace {

std::vector<std::uint8_t> f32_file(std::uint32_t h, std::uint32_t w, std::uint32_t n,
                                   const std::vector<float>& values) {
  std::vector<std::uint8_t> b = {0x53, 0x47, 0x54, 0x31, 0x01, 0x01, 0x03, 0x00};
  for (std::uint32_t d : {h, w, n}) {
    for (int s = 0; s < 32; s += 8) b.push_back(static_cast<std::uint8_t>(d >> s));
  }
  for (float v : values) {
    const auto u = std::bit_cast<std::uint32_t>(v);
    for (int s = 0; s < 32; s += 8) b.push_back(static_cast<std::uint8_t>(u >> s));
  }
  return b;
}

struct Pgm {
  std::uint32_t width = 0, height = 0, max_val = 0;
  std::vector<std::uint32_t> values;
};

// Minimal P5 reader written against the netpbm description, independent of encode_pgm.
Pgm parse_pgm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t += static_cast<char>(bytes[pos++]);
    return t;
  };
  REQUIRE(token() == "P5");
  Pgm p;
  p.width = static_cast<std::uint32_t>(std::stoul(token()));
  p.height = static_cast<std::uint32_t>(std::stoul(token()));
  p.max_val = static_cast<std::uint32_t>(std::stoul(token()));
  ++pos;  // single whitespace before the raster
  const std::size_t bps = p.max_val > 255 ? 2 : 1;
  REQUIRE(bytes.size() - pos == static_cast<std::size_t>(p.width) * p.height * bps);
  for (std::size_t i = 0; i < static_cast<std::size_t>(p.width) * p.height; ++i) {
    p.values.push_back(bps == 2 ? (std::uint32_t{bytes[pos]} << 8) | bytes[pos + 1] : bytes[pos]);
    pos += bps;
  }
  return p;
}

}  // namespace

TEST_CASE("1x1 label map encodes to the exact SGT1 byte sequence") {
  testing::TempDir dir("io");
  write_tensor(dir / "a.sgt", LabelMap::filled(1, 1, 1, 0));
  const std::vector<std::uint8_t> expected = {0x53, 0x47, 0x54, 0x31, 0x01, 0x00, 0x02, 0x00,
                                              0x01, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00,
                                              0x00};
  CHECK(read_bytes(dir / "a.sgt") == expected);
  const LabelMap back = read_label_map(dir / "a.sgt");
  CHECK(back.height() == 1);
  CHECK(back.width() == 1);
  CHECK(back.at(0, 0) == 0);
}

TEST_CASE("uniform 2x2x3 probability map payload") {
  const float third = 1.0f / 3.0f;
  const ProbabilityMap m(2, 2, 3, std::vector<float>(12, third));
  const auto bytes = encode_tensor(m);
  REQUIRE(bytes.size() == 8 + 12 + 48);
  const std::vector<std::uint8_t> dims = {2, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0};
  CHECK(std::vector<std::uint8_t>(bytes.begin() + 8, bytes.begin() + 20) == dims);
  for (std::size_t i = 0; i < 12; ++i) {
    const std::size_t o = 20 + 4 * i;
    const std::uint32_t word = bytes[o] | (bytes[o + 1] << 8) | (bytes[o + 2] << 16) |
                               (std::uint32_t{bytes[o + 3]} << 24);
    CHECK(word == 0x3EAAAAABu);
  }
}

TEST_CASE("random label maps round-trip bit-exactly") {
  testing::Rng rng(101);
  testing::TempDir dir("io");
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = static_cast<std::uint32_t>(rng.between(1, 9));
    const auto w = static_cast<std::uint32_t>(rng.between(1, 9));
    const int n = rng.between(1, 12);
    const LabelMap m = trial == 0 ? testing::random_labels(rng, 7, 5, 4) : testing::random_labels(rng, h, w, n);
    const auto path = dir / "m.sgt";
    write_tensor(path, m);
    const auto bytes = read_bytes(path);
    const LabelMap back = read_label_map(path, m.num_classes());
    CHECK(back == m);
    write_tensor(path, back);
    CHECK(read_bytes(path) == bytes);
  }
}

TEST_CASE("random float tensors round-trip bit-exactly") {
  testing::Rng rng(102);
  testing::TempDir dir("io");
  for (int trial = 0; trial < 30; ++trial) {
    const auto h = static_cast<std::uint32_t>(rng.between(1, 8));
    const auto w = static_cast<std::uint32_t>(rng.between(1, 8));
    const int n = rng.between(1, 6);
    const ProbabilityMap p = testing::random_probs(rng, h, w, n);
    write_tensor(dir / "p.sgt", p);
    CHECK(read_probability_map(dir / "p.sgt") == p);

    std::vector<float> feats(static_cast<std::size_t>(h) * w);
    for (auto& f : feats) f = static_cast<float>(rng.uniform(-5, 5));
    const FeatureMap fm(h, w, feats);
    write_tensor(dir / "f.sgt", fm);
    CHECK(read_feature_map(dir / "f.sgt") == fm);
  }
}

TEST_CASE("reader rejects malformed files") {
  testing::TempDir dir("io");
  auto good = encode_tensor(LabelMap::filled(2, 2, 2, 1));

  SUBCASE("bad magic") {
    auto b = good;
    std::memcpy(b.data(), "XXXX", 4);
    CHECK_THROWS_AS(decode_tensor(b), FormatError);
  }
  SUBCASE("bad version") {
    auto b = good;
    b[4] = 0x02;
    CHECK_THROWS_AS(decode_tensor(b), FormatError);
  }
  SUBCASE("unknown dtype") {
    auto b = good;
    b[5] = 0x07;
    CHECK_THROWS_AS(decode_tensor(b), FormatError);
  }
  SUBCASE("truncated payload") {
    auto b = good;
    b.pop_back();
    CHECK_THROWS_AS(decode_tensor(b), FormatError);
  }
  SUBCASE("trailing bytes") {
    auto b = good;
    b.push_back(0);
    CHECK_THROWS_AS(decode_tensor(b), FormatError);
  }
  SUBCASE("truncated header") {
    CHECK_THROWS_AS(decode_tensor(std::vector<std::uint8_t>(good.begin(), good.begin() + 10)),
                    FormatError);
  }
}

TEST_CASE("probability map whose pixel sums to 0.5 is rejected naming the pixel") {
  testing::TempDir dir("io");
  write_bytes(dir / "p.sgt", f32_file(1, 2, 2, {0.5f, 0.5f, 0.25f, 0.25f}));
  try {
    (void)read_probability_map(dir / "p.sgt");
    FAIL("expected an invariant error");
  } catch (const InvariantError& e) {
    CHECK(std::string(e.what()).find("pixel (0, 1)") != std::string::npos);
  }
}

TEST_CASE("writing into a missing directory fails") {
  testing::TempDir dir("io");
  CHECK_THROWS_AS(write_tensor(dir / "missing" / "a.sgt", LabelMap::filled(1, 1, 1, 0)), IoError);
}

TEST_CASE("prior stack loading infers raw versus smoothed") {
  testing::TempDir dir("io");
  write_bytes(dir / "raw.sgt", f32_file(1, 2, 2, {0.25f, 0.75f, 1.0f, 0.0f}));
  const PriorStack raw = read_prior_stack(dir / "raw.sgt");
  CHECK_FALSE(raw.smoothed());

  write_bytes(dir / "smooth.sgt", f32_file(1, 2, 2, {0.3f, 0.75f, 1.0f, 0.001f}));
  const PriorStack smooth = read_prior_stack(dir / "smooth.sgt");
  CHECK(smooth.smoothed());
  CHECK(smooth.cutoff() == 0.001f);
}

TEST_CASE("PGM encoding") {
  SUBCASE("8-bit") {
    const std::vector<std::uint32_t> v = {0, 255};
    const auto bytes = encode_pgm(1, 2, v, 255);
    const std::string head = "P5\n2 1\n255\n";
    std::vector<std::uint8_t> expected(head.begin(), head.end());
    expected.push_back(0x00);
    expected.push_back(0xFF);
    CHECK(bytes == expected);
  }
  SUBCASE("16-bit big-endian") {
    const std::vector<std::uint32_t> v = {300};
    const auto bytes = encode_pgm(1, 1, v, 65535);
    REQUIRE(bytes.size() >= 2);
    CHECK(bytes[bytes.size() - 2] == 0x01);
    CHECK(bytes[bytes.size() - 1] == 0x2C);
  }
  SUBCASE("value above max is rejected") {
    const std::vector<std::uint32_t> v = {256};
    CHECK_THROWS_AS(encode_pgm(1, 1, v, 255), InvariantError);
  }
}

TEST_CASE("PGM files read back through an independent parser") {
  testing::Rng rng(103);
  testing::TempDir dir("io");
  for (int trial = 0; trial < 40; ++trial) {
    const auto h = static_cast<std::uint32_t>(rng.between(1, 20));
    const auto w = static_cast<std::uint32_t>(rng.between(1, 20));
    const std::uint32_t max_val = trial % 2 ? 255 : static_cast<std::uint32_t>(rng.between(256, 65535));
    std::vector<std::uint32_t> v(static_cast<std::size_t>(h) * w);
    for (auto& x : v) x = rng.below(max_val + 1);
    write_pgm(dir / "h.pgm", h, w, v, max_val);
    const Pgm p = parse_pgm(read_bytes(dir / "h.pgm"));
    CHECK(p.width == w);
    CHECK(p.height == h);
    CHECK(p.max_val == max_val);
    CHECK(p.values == v);
  }
}
