// test_image.cpp
#include <doctest.h>

#include <cstring>
#include <random>
#include <string>

#include "penmf/image.hpp"

using namespace penmf;

namespace {

std::vector<unsigned char> bytes_of(const std::string& s) {
  return std::vector<unsigned char>(s.begin(), s.end());
}

GrayImage random_image(int w, int h, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  GrayImage img;
  img.width = w;
  img.height = h;
  img.intensities.resize(static_cast<std::size_t>(w) * h);
  for (double& v : img.intensities) v = dist(gen);
  return img;
}

}  // namespace

TEST_CASE("parse P2") {
  const auto img = parse_pgm(bytes_of("P2\n2 2\n255\n0 255 128 64"));
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.intensities[0] == 0.0);
  CHECK(img.intensities[1] == 1.0);
  CHECK(img.intensities[2] == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
  CHECK(img.intensities[3] == doctest::Approx(64.0 / 255.0).epsilon(1e-15));
}

TEST_CASE("parse P5") {
  std::vector<unsigned char> data = bytes_of("P5\n2 2\n255\n");
  data.insert(data.end(), {0, 255, 255, 0});
  const auto img = parse_pgm(data);
  CHECK(img.intensities == std::vector<double>{0.0, 1.0, 1.0, 0.0});
}

TEST_CASE("header comments are skipped") {
  const auto img = parse_pgm(bytes_of("P2 # format\n# full-line comment\n2 # width\n1\n255\n7 9"));
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  CHECK(img.intensities[0] == doctest::Approx(7.0 / 255.0));
}

TEST_CASE("exactly one whitespace byte separates maxval from the P5 raster") {
  // First sample is 0x0a, a byte that looks like whitespace; it must be
  // treated as raster data, not eaten by the header scan.
  std::vector<unsigned char> data = bytes_of("P5\n2 1\n255\n");
  data.insert(data.end(), {0x0a, 0x20});
  const auto img = parse_pgm(data);
  CHECK(img.intensities[0] == doctest::Approx(10.0 / 255.0));
  CHECK(img.intensities[1] == doctest::Approx(32.0 / 255.0));
}

TEST_CASE("16-bit samples are big-endian") {
  std::vector<unsigned char> data = bytes_of("P5\n2 1\n65535\n");
  data.insert(data.end(), {0xff, 0xff, 0x01, 0x00});
  const auto img = parse_pgm(data);
  CHECK(img.intensities[0] == 1.0);
  CHECK(img.intensities[1] == doctest::Approx(256.0 / 65535.0).epsilon(1e-12));
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(parse_pgm(bytes_of("P6\n1 1\n255\n")), ParseError);
  try {
    parse_pgm(bytes_of("Px"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() == 0);
  }
  // Truncated P5 raster.
  try {
    parse_pgm(bytes_of("P5\n2 2\n255\nAB"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() != ParseError::npos);
    CHECK(doctest::String(e.what()) == doctest::Contains("truncated"));
  }
  // Bad maxval.
  CHECK_THROWS_WITH_AS(parse_pgm(bytes_of("P2\n1 1\n0\n0")), doctest::Contains("maxval"),
                       ParseError);
  CHECK_THROWS_AS(parse_pgm(bytes_of("P2\n1 1\n70000\n0")), ParseError);
  // Sample above maxval.
  CHECK_THROWS_AS(parse_pgm(bytes_of("P2\n1 1\n200\n201")), ParseError);
  // Missing sample.
  CHECK_THROWS_AS(parse_pgm(bytes_of("P2\n2 1\n255\n0")), ParseError);
}

TEST_CASE("write/parse round trip at quantization precision") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto img = random_image(9, 4, 900 + seed);
    for (PgmFormat format : {PgmFormat::P2, PgmFormat::P5}) {
      for (int maxval : {255, 65535}) {
        const auto data = write_pgm(img, format, maxval);
        const auto back = parse_pgm(data);
        REQUIRE(back.width == img.width);
        REQUIRE(back.height == img.height);
        for (std::size_t i = 0; i < img.intensities.size(); ++i) {
          CHECK(std::abs(back.intensities[i] - img.intensities[i]) <= 0.5 / maxval + 1e-12);
        }
        // Re-serialization of the parsed image reproduces the bytes exactly.
        CHECK(write_pgm(back, format, maxval) == data);
      }
    }
  }
}

TEST_CASE("downsample block mean") {
  GrayImage tiny;
  tiny.width = 2;
  tiny.height = 2;
  tiny.intensities = {0, 1, 1, 0};
  const auto one = downsample(tiny, 1, 1);
  CHECK(one.intensities[0] == 0.5);

  GrayImage flat;
  flat.width = 12;
  flat.height = 9;
  flat.intensities.assign(108, 0.375);
  for (auto [tw, th] : {std::pair{4, 3}, {3, 3}, {1, 1}, {12, 9}}) {
    const auto out = downsample(flat, tw, th);
    CHECK(out.width == tw);
    for (double v : out.intensities) CHECK(v == doctest::Approx(0.375).epsilon(1e-15));
  }
}

TEST_CASE("downsample matches an independent block-mean oracle at face-data scale") {
  const auto img = random_image(92, 112, 77);  // native portrait resolution
  const auto out = downsample(img, 23, 28);
  REQUIRE(out.width == 23);
  REQUIRE(out.height == 28);
  for (int oy = 0; oy < 28; ++oy) {
    for (int ox = 0; ox < 23; ++ox) {
      double sum = 0.0;
      for (int dy = 0; dy < 4; ++dy) {
        for (int dx = 0; dx < 4; ++dx) {
          sum += img.intensities[static_cast<std::size_t>(oy * 4 + dy) * 92 + (ox * 4 + dx)];
        }
      }
      CHECK(std::abs(out.intensities[static_cast<std::size_t>(oy) * 23 + ox] - sum / 16.0) <
            1e-12);
    }
  }
}

TEST_CASE("downsample falls back to bilinear for non-integer factors") {
  // 320x243 -> 80x61: the vertical factor is not an integer.
  GrayImage img = random_image(320, 243, 78);
  const auto out = downsample(img, 80, 61);
  CHECK(out.width == 80);
  CHECK(out.height == 61);
  for (double v : out.intensities) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  GrayImage flat;
  flat.width = 5;
  flat.height = 7;
  flat.intensities.assign(35, 0.6);
  const auto small = downsample(flat, 2, 3);
  for (double v : small.intensities) CHECK(v == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("downsample rejects upscaling") {
  const auto img = random_image(4, 4, 79);
  CHECK_THROWS_AS(downsample(img, 8, 4), ParameterError);
  CHECK_THROWS_AS(downsample(img, 4, 0), ParameterError);
}

TEST_CASE("P2 body lines stay within the 70-character limit") {
  GrayImage img;
  img.width = 40;
  img.height = 3;
  img.intensities.assign(120, 1.0);  // five-digit samples at maxval 65535
  const auto data = write_pgm(img, PgmFormat::P2, 65535);
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] == '\n') {
      CHECK(i - line_start <= 70);
      line_start = i + 1;
    }
  }
}
