// Copyright 2026 The hlsr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file stencil.hpp
 * @brief 3x3 convolution: the nested-loop software form and a cycle-level
 * line-buffer / window-buffer streaming simulator.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "hlsr/error.hpp"

namespace hlsr::stencil {

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  Image() = default;
  Image(std::size_t w, std::size_t h, std::vector<std::uint8_t> px)
      : width(w), height(h), pixels(std::move(px)) {
    if (pixels.size() != width * height) {
      throw Error(ErrorKind::invalid_input,
                  "pixel count " + std::to_string(pixels.size()) +
                      " does not match " + std::to_string(width) + "x" +
                      std::to_string(height));
    }
  }

  std::uint8_t at(std::size_t row, std::size_t col) const {
    return pixels[row * width + col];
  }

  friend bool operator==(const Image&, const Image&) = default;
};

struct Coeffs3x3 {
  std::array<std::array<int, 3>, 3> c{};

  int operator()(std::size_t r, std::size_t col) const { return c[r][col]; }

  friend bool operator==(const Coeffs3x3&, const Coeffs3x3&) = default;
};

inline Coeffs3x3 make_coeffs(const std::array<std::array<int, 3>, 3>& c) {
  for (const auto& row : c) {
    for (int v : row) {
      if (v < -128 || v > 127) {
        throw Error(ErrorKind::invalid_input,
                    "coefficient " + std::to_string(v) +
                        " outside signed 8-bit range");
      }
    }
  }
  return Coeffs3x3{c};
}

// Canonical Sobel operator, window rows top to bottom.
inline constexpr Coeffs3x3 SOBEL_GX_STANDARD{{{{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}}}};
inline constexpr Coeffs3x3 SOBEL_GY_STANDARD{{{{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}}}};
// Variant sign layout kept for reproducing the reference design outputs.
inline constexpr Coeffs3x3 SOBEL_GX_PAPER{{{{1, 0, 1}, {2, 0, 2}, {-1, 0, 1}}}};
inline constexpr Coeffs3x3 SOBEL_GY_PAPER{{{{1, 2, 1}, {0, 0, 0}, {-1, -2, -1}}}};

enum class ResponseMode {
  raw,      // D_x + D_y
  display,  // |D_x| + |D_y| clamped to [0, 255]
};

struct ResponseImage {
  std::size_t width = 0;
  std::size_t height = 0;
  ResponseMode mode = ResponseMode::raw;
  std::vector<std::int32_t> values;  // row-major

  std::int32_t at(std::size_t row, std::size_t col) const {
    return values[row * width + col];
  }

  friend bool operator==(const ResponseImage&, const ResponseImage&) = default;
};

using Window = std::array<std::array<std::int32_t, 3>, 3>;

/// Response of one full 3x3 window.
inline std::int32_t apply_window(const Window& w, const Coeffs3x3& gx,
                                 const Coeffs3x3& gy, ResponseMode mode) {
  std::int32_t dx = 0;
  std::int32_t dy = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      dx += w[r][c] * gx(r, c);
      dy += w[r][c] * gy(r, c);
    }
  }
  if (mode == ResponseMode::raw) return dx + dy;
  return std::min<std::int32_t>(std::abs(dx) + std::abs(dy), 255);
}

inline bool is_interior(std::size_t row, std::size_t col, std::size_t width,
                        std::size_t height) {
  return row >= 1 && col >= 1 && row + 1 < height && col + 1 < width;
}

inline void require_convolvable(const Image& image) {
  if (image.width < 3 || image.height < 3) {
    throw Error(ErrorKind::invalid_input,
                "image must be at least 3x3, got " +
                    std::to_string(image.width) + "x" +
                    std::to_string(image.height));
  }
  if (image.pixels.size() != image.width * image.height) {
    throw Error(ErrorKind::invalid_input, "pixel count does not match size");
  }
}

/// Nested-loop software form. Border centers are 0.
inline ResponseImage convolve_reference(const Image& image, const Coeffs3x3& gx,
                                        const Coeffs3x3& gy,
                                        ResponseMode mode = ResponseMode::raw) {
  require_convolvable(image);
  ResponseImage out{image.width, image.height, mode,
                    std::vector<std::int32_t>(image.pixels.size(), 0)};
  for (std::size_t i = 1; i + 1 < image.height; ++i) {
    for (std::size_t j = 1; j + 1 < image.width; ++j) {
      Window w{};
      for (std::size_t ro = 0; ro < 3; ++ro) {
        for (std::size_t co = 0; co < 3; ++co) {
          w[ro][co] = image.at(i + ro - 1, j + co - 1);
        }
      }
      out.values[i * image.width + j] = apply_window(w, gx, gy, mode);
    }
  }
  return out;
}

struct StreamOutput {
  std::size_t row = 0;
  std::size_t col = 0;
  std::int32_t value = 0;

  friend bool operator==(const StreamOutput&, const StreamOutput&) = default;
};

/// Worst-case line-buffer port usage observed in any single push.
struct MemoryAccessStats {
  std::array<std::size_t, 3> max_reads_per_push{};
  std::array<std::size_t, 3> max_writes_per_push{};
  std::size_t window_reads = 0;
};

/**
 * Line buffer (3 rows of width pixels) feeding a 3x3 window register.
 *
 * Each push, at column j: read the column from the three line-buffer rows,
 * shift it up by one row with the new pixel at the bottom and write it
 * back, then shift the window left (dropping its oldest column) and load
 * the updated column on the right. The window is centered one row and one
 * column behind the input cursor, so output starts after width + 1 pushes.
 */
class StreamingConvState {
 public:
  StreamingConvState(std::size_t width, std::size_t height, Coeffs3x3 gx,
                     Coeffs3x3 gy, ResponseMode mode = ResponseMode::raw)
      : width_(width), height_(height), gx_(gx), gy_(gy), mode_(mode) {
    if (width < 3 || height < 3) {
      throw Error(ErrorKind::invalid_input,
                  "image must be at least 3x3, got " + std::to_string(width) +
                      "x" + std::to_string(height));
    }
    for (auto& row : line_buffer_) row.assign(width, 0);
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pushes() const noexcept { return pushes_; }
  std::size_t latency() const noexcept { return width_ + 1; }
  bool complete() const noexcept { return pushes_ == width_ * height_; }
  const MemoryAccessStats& access_stats() const noexcept { return stats_; }

  Window window() const {
    ++stats_.window_reads;
    return window_;
  }

  std::optional<StreamOutput> push(std::uint8_t pixel) {
    if (complete()) {
      throw Error(ErrorKind::protocol,
                  "push beyond image extent (" + std::to_string(width_) + "x" +
                      std::to_string(height_) + ")");
    }
    const std::size_t j = pushes_ % width_;

    std::array<std::size_t, 3> reads{};
    std::array<std::size_t, 3> writes{};
    std::array<std::int32_t, 3> column{};
    for (std::size_t r = 0; r < 3; ++r) {
      column[r] = line_buffer_[r][j];
      ++reads[r];
    }
    const std::array<std::int32_t, 3> shifted{column[1], column[2], pixel};
    for (std::size_t r = 0; r < 3; ++r) {
      line_buffer_[r][j] = shifted[r];
      ++writes[r];
    }
    for (std::size_t r = 0; r < 3; ++r) {
      window_[r][0] = window_[r][1];
      window_[r][1] = window_[r][2];
      window_[r][2] = shifted[r];
    }
    for (std::size_t r = 0; r < 3; ++r) {
      stats_.max_reads_per_push[r] = std::max(stats_.max_reads_per_push[r], reads[r]);
      stats_.max_writes_per_push[r] = std::max(stats_.max_writes_per_push[r], writes[r]);
    }
    ++pushes_;

    if (pushes_ <= latency()) return std::nullopt;
    const std::size_t center = pushes_ - latency() - 1;
    const std::size_t row = center / width_;
    const std::size_t col = center % width_;
    std::int32_t value = 0;
    if (is_interior(row, col, width_, height_)) {
      value = apply_window(window(), gx_, gy_, mode_);
    }
    return StreamOutput{row, col, value};
  }

 private:
  std::size_t width_;
  std::size_t height_;
  Coeffs3x3 gx_;
  Coeffs3x3 gy_;
  ResponseMode mode_;
  std::array<std::vector<std::int32_t>, 3> line_buffer_;
  Window window_{};
  std::size_t pushes_ = 0;
  mutable MemoryAccessStats stats_{};
};

struct StreamingResult {
  ResponseImage image;
  std::size_t pushes = 0;
  std::size_t emitted = 0;
  // true when every emission after the latency came on consecutive pushes
  bool stall_free = true;
  MemoryAccessStats access{};
};

/// Drives the streaming state over the image in raster order, one pixel per
/// simulated cycle. The last width + 1 centers are never emitted; they are
/// all border positions and stay 0.
inline StreamingResult convolve_streaming(const Image& image,
                                          const Coeffs3x3& gx,
                                          const Coeffs3x3& gy,
                                          ResponseMode mode = ResponseMode::raw) {
  require_convolvable(image);
  StreamingConvState state(image.width, image.height, gx, gy, mode);
  StreamingResult result;
  result.image = ResponseImage{image.width, image.height, mode,
                               std::vector<std::int32_t>(image.pixels.size(), 0)};
  std::optional<std::size_t> last_emit_push;
  for (std::uint8_t px : image.pixels) {
    const auto out = state.push(px);
    if (!out) continue;
    if (last_emit_push && *last_emit_push + 1 != state.pushes()) {
      result.stall_free = false;
    }
    last_emit_push = state.pushes();
    result.image.values[out->row * image.width + out->col] = out->value;
    ++result.emitted;
  }
  result.pushes = state.pushes();
  result.access = state.access_stats();
  return result;
}

}  // namespace hlsr::stencil
