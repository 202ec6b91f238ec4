// Copyright 2026 The FreqNorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "freqnorm/image_io.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

#include "freqnorm/errors.h"
#include "freqnorm/tensor_io.h"

namespace freqnorm {

namespace fs = std::filesystem;

Tensor image_to_tensor(const Image8& img) {
  Tensor t = Tensor::zeros({1, 3, img.height, img.width});
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        t.at(0, c, y, x) = img.rgb[(y * img.width + x) * 3 + c] / 255.0;
      }
    }
  }
  return t;
}

Image8 tensor_to_image(const Tensor& t) {
  const Shape& s = t.shape();
  if (s.n != 1 || s.c != 3) throw ShapeError("image: expected (1,3,h,w), got " + s.str());
  Image8 img{s.w, s.h, std::vector<std::uint8_t>(s.h * s.w * 3)};
  for (std::size_t y = 0; y < s.h; ++y) {
    for (std::size_t x = 0; x < s.w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = std::clamp(std::round(t.at(0, c, y, x) * 255.0), 0.0, 255.0);
        img.rgb[(y * s.w + x) * 3 + c] = static_cast<std::uint8_t>(v);
      }
    }
  }
  return img;
}

std::vector<char> encode_ppm(const Image8& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<char> out(header.begin(), header.end());
  out.insert(out.end(), img.rgb.begin(), img.rgb.end());
  return out;
}

Image8 decode_ppm(const std::vector<char>& bytes, const std::string& origin) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> std::size_t {
    skip_space();
    std::size_t v = 0, digits = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + static_cast<std::size_t>(bytes[pos] - '0');
      if (++digits > 9) throw IoError(origin, "PPM header value too large");
      ++pos;
    }
    if (digits == 0) throw IoError(origin, "malformed PPM header");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw IoError(origin, "not a binary PPM (P6) file");
  }
  pos = 2;
  const std::size_t w = number(), h = number(), maxval = number();
  if (w == 0 || h == 0 || maxval == 0 || maxval > 255) {
    throw IoError(origin, "unsupported PPM dimensions or maxval");
  }
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw IoError(origin, "malformed PPM header");
  }
  ++pos;
  if (bytes.size() - pos != w * h * 3) throw IoError(origin, "PPM payload size mismatch");
  Image8 img{w, h, std::vector<std::uint8_t>(w * h * 3)};
  for (std::size_t i = 0; i < img.rgb.size(); ++i) {
    const auto v = static_cast<unsigned char>(bytes[pos + i]);
    if (v > maxval) throw IoError(origin, "PPM sample exceeds maxval");
    img.rgb[i] = static_cast<std::uint8_t>(std::lround(v * 255.0 / static_cast<double>(maxval)));
  }
  return img;
}

std::vector<char> encode_png(const Image8& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.rgb.data(), 0, nullptr)) {
    throw IoError("<png>", std::string("png encode failed: ") + image.message);
  }
  std::vector<char> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.rgb.data(), 0, nullptr)) {
    throw IoError("<png>", std::string("png encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

Image8 decode_png(const std::vector<char>& bytes, const std::string& origin) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError(origin, std::string("png decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  Image8 img{image.width, image.height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(image))};
  if (!png_image_finish_read(&image, nullptr, img.rgb.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError(origin, std::string("png decode failed: ") + image.message);
  }
  return img;
}

namespace {

std::string extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

Tensor read_image(const fs::path& path) {
  const std::string ext = extension(path);
  const std::string text = read_file(path);
  const std::vector<char> bytes(text.begin(), text.end());
  if (ext == ".png") return image_to_tensor(decode_png(bytes, path.string()));
  if (ext == ".ppm") return image_to_tensor(decode_ppm(bytes, path.string()));
  throw IoError(path.string(), "unsupported image extension (use .png or .ppm)");
}

void write_image(const fs::path& path, const Tensor& t) {
  const std::string ext = extension(path);
  std::vector<char> bytes;
  if (ext == ".png") {
    bytes = encode_png(tensor_to_image(t));
  } else if (ext == ".ppm") {
    bytes = encode_ppm(tensor_to_image(t));
  } else {
    throw IoError(path.string(), "unsupported image extension (use .png or .ppm)");
  }
  write_file_atomic(path, std::string_view(bytes.data(), bytes.size()));
}

}  // namespace freqnorm
