// image.cpp
#include "penmf/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace penmf {

namespace {

bool is_pgm_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

struct Cursor {
  std::span<const unsigned char> data;
  std::size_t pos = 0;

  bool done() const { return pos >= data.size(); }
  unsigned char peek() const { return data[pos]; }

  // Skips whitespace and '#' comments (comment runs to end of line).
  void skip_space_and_comments() {
    while (!done()) {
      if (is_pgm_space(peek())) {
        ++pos;
      } else if (peek() == '#') {
        while (!done() && peek() != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  // Reads a nonnegative decimal integer token.
  long read_uint(const char* what) {
    skip_space_and_comments();
    if (done() || peek() < '0' || peek() > '9') {
      throw ParseError(std::string("pgm: expected ") + what, pos);
    }
    long value = 0;
    while (!done() && peek() >= '0' && peek() <= '9') {
      value = value * 10 + (peek() - '0');
      if (value > 1'000'000'000L) throw ParseError(std::string("pgm: ") + what + " too large", pos);
      ++pos;
    }
    return value;
  }
};

}  // namespace

GrayImage parse_pgm(std::span<const unsigned char> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("pgm: missing P2/P5 magic", 0);
  }
  const bool binary = bytes[1] == '5';
  Cursor cur{bytes, 2};

  const long width = cur.read_uint("width");
  const long height = cur.read_uint("height");
  const long maxval = cur.read_uint("maxval");
  if (width < 1 || height < 1) {
    throw ParseError("pgm: dimensions must be positive", cur.pos);
  }
  if (maxval <= 0 || maxval > 65535) {
    throw ParseError("pgm: maxval must lie in [1, 65535], got " + std::to_string(maxval),
                     cur.pos);
  }

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  GrayImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.intensities.resize(count);
  const double scale = 1.0 / static_cast<double>(maxval);

  if (binary) {
    // Exactly one whitespace character between maxval and the raster.
    if (cur.done() || !is_pgm_space(cur.peek())) {
      throw ParseError("pgm: expected single whitespace before P5 raster", cur.pos);
    }
    ++cur.pos;
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    if (bytes.size() - cur.pos < count * bytes_per_sample) {
      throw ParseError("pgm: truncated P5 raster", bytes.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      long v;
      if (bytes_per_sample == 2) {
        v = (static_cast<long>(bytes[cur.pos]) << 8) | static_cast<long>(bytes[cur.pos + 1]);
        cur.pos += 2;
      } else {
        v = bytes[cur.pos++];
      }
      if (v > maxval) {
        throw ParseError("pgm: sample exceeds maxval", cur.pos - bytes_per_sample);
      }
      img.intensities[i] = static_cast<double>(v) * scale;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t at = cur.pos;
      const long v = cur.read_uint("sample");
      if (v > maxval) throw ParseError("pgm: sample exceeds maxval", at);
      img.intensities[i] = static_cast<double>(v) * scale;
    }
  }
  return img;
}

std::vector<unsigned char> write_pgm(const GrayImage& img, PgmFormat format, int maxval) {
  if (img.width < 1 || img.height < 1 ||
      img.intensities.size() !=
          static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height)) {
    throw ParameterError("write_pgm: image dimensions inconsistent with pixel data");
  }
  if (maxval < 1 || maxval > 65535) {
    throw ParameterError("write_pgm: maxval must lie in [1, 65535]");
  }

  std::string header = (format == PgmFormat::P5 ? "P5\n" : "P2\n") + std::to_string(img.width) +
                       " " + std::to_string(img.height) + "\n" + std::to_string(maxval) + "\n";
  std::vector<unsigned char> out(header.begin(), header.end());

  auto quantize = [&](double v) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return static_cast<long>(std::lround(clamped * maxval));
  };

  if (format == PgmFormat::P5) {
    const bool wide = maxval > 255;
    out.reserve(out.size() + img.intensities.size() * (wide ? 2 : 1));
    for (double v : img.intensities) {
      const long q = quantize(v);
      if (wide) {
        out.push_back(static_cast<unsigned char>((q >> 8) & 0xff));
        out.push_back(static_cast<unsigned char>(q & 0xff));
      } else {
        out.push_back(static_cast<unsigned char>(q));
      }
    }
  } else {
    // 10 samples per row keeps lines within the format's 70-character limit
    // even at five-digit samples.
    std::string body;
    int on_line = 0;
    for (std::size_t i = 0; i < img.intensities.size(); ++i) {
      body += std::to_string(quantize(img.intensities[i]));
      if (++on_line == 10 || i + 1 == img.intensities.size()) {
        body += '\n';
        on_line = 0;
      } else {
        body += ' ';
      }
    }
    out.insert(out.end(), body.begin(), body.end());
  }
  return out;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return parse_pgm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path, PgmFormat format,
              int maxval) {
  const std::vector<unsigned char> bytes = write_pgm(img, format, maxval);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

GrayImage block_mean(const GrayImage& img, int target_w, int target_h) {
  const int fw = img.width / target_w;
  const int fh = img.height / target_h;
  GrayImage out;
  out.width = target_w;
  out.height = target_h;
  out.intensities.resize(static_cast<std::size_t>(target_w) * target_h);
  const double inv = 1.0 / (static_cast<double>(fw) * fh);
  for (int oy = 0; oy < target_h; ++oy) {
    for (int ox = 0; ox < target_w; ++ox) {
      double sum = 0.0;
      for (int dy = 0; dy < fh; ++dy) {
        const double* row = img.intensities.data() +
                            static_cast<std::size_t>(oy * fh + dy) * img.width + ox * fw;
        for (int dx = 0; dx < fw; ++dx) sum += row[dx];
      }
      out.intensities[static_cast<std::size_t>(oy) * target_w + ox] = sum * inv;
    }
  }
  return out;
}

GrayImage bilinear(const GrayImage& img, int target_w, int target_h) {
  GrayImage out;
  out.width = target_w;
  out.height = target_h;
  out.intensities.resize(static_cast<std::size_t>(target_w) * target_h);
  const double sx = static_cast<double>(img.width) / target_w;
  const double sy = static_cast<double>(img.height) / target_h;
  auto at = [&](int y, int x) {
    return img.intensities[static_cast<std::size_t>(y) * img.width + x];
  };
  for (int oy = 0; oy < target_h; ++oy) {
    const double cy = std::max((oy + 0.5) * sy - 0.5, 0.0);
    const int y0 = std::min(static_cast<int>(cy), img.height - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double ty = cy - y0;
    for (int ox = 0; ox < target_w; ++ox) {
      const double cx = std::max((ox + 0.5) * sx - 0.5, 0.0);
      const int x0 = std::min(static_cast<int>(cx), img.width - 1);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double tx = cx - x0;
      const double top = at(y0, x0) * (1.0 - tx) + at(y0, x1) * tx;
      const double bottom = at(y1, x0) * (1.0 - tx) + at(y1, x1) * tx;
      const double v = top * (1.0 - ty) + bottom * ty;
      out.intensities[static_cast<std::size_t>(oy) * target_w + ox] = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace

GrayImage downsample(const GrayImage& img, int target_w, int target_h) {
  if (target_w < 1 || target_h < 1) {
    throw ParameterError("downsample: target dimensions must be positive");
  }
  if (target_w > img.width || target_h > img.height) {
    throw ParameterError("downsample: upscaling from " + std::to_string(img.width) + "x" +
                         std::to_string(img.height) + " to " + std::to_string(target_w) + "x" +
                         std::to_string(target_h) + " not supported");
  }
  if (target_w == img.width && target_h == img.height) return img;
  if (img.width % target_w == 0 && img.height % target_h == 0) {
    return block_mean(img, target_w, target_h);
  }
  return bilinear(img, target_w, target_h);
}

}  // namespace penmf
