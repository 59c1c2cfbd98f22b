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
 * @file cycle_model.hpp
 * @brief Closed-form clock-cycle estimates for the software-style and
 * restructured schedules of the Huffman and convolution kernels.
 *
 * The models do not schedule operations. They are calibrated formulas:
 *
 *   conv / restructured   width * height            (II = 1 over all pixels)
 *   conv / software       C_pixel * (K^2/9) * w*h + C_0
 *   huffman / restructured  r * (2n - 1) + L        (one pass, 2n-1 nodes)
 *   huffman / software      a * n^2 + b * n + c     (sorted insert per merge)
 *
 * The `paper-table` profile matches the synthesized reference designs:
 *
 *   C_pixel = 68, C_0 = 1:   68 * 640 * 480 + 1 = 20889601
 *   a = 27, b = 248, c = 1:  27 * 536^2 + 248 * 536 + 1 = 7889921
 *   r = 2.9, L = 36:         2.9 * 1071 + 36 = 3141.9 -> 3142
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hlsr/error.hpp"

namespace hlsr::cycle_model {

enum class Kernel { huffman, conv };
enum class Style { software, restructured };

constexpr std::string_view to_string(Kernel k) {
  return k == Kernel::huffman ? "huffman" : "conv";
}
constexpr std::string_view to_string(Style s) {
  return s == Style::software ? "software" : "restructured";
}

inline Kernel parse_kernel(std::string_view s) {
  if (s == "huffman") return Kernel::huffman;
  if (s == "conv") return Kernel::conv;
  throw Error(ErrorKind::configuration, "unknown design '" + std::string(s) + "'");
}

inline Style parse_style(std::string_view s) {
  if (s == "software") return Style::software;
  if (s == "restructured") return Style::restructured;
  throw Error(ErrorKind::configuration, "unknown style '" + std::string(s) + "'");
}

struct LoopSchedule {
  Kernel kernel = Kernel::conv;
  Style style = Style::restructured;
  std::uint64_t n = 0;       // huffman symbols
  std::uint64_t width = 0;   // conv
  std::uint64_t height = 0;  // conv
  std::uint64_t kernel_size = 3;

  static LoopSchedule huffman(Style style, std::uint64_t n) {
    return {Kernel::huffman, style, n, 0, 0, 3};
  }
  static LoopSchedule conv(Style style, std::uint64_t width,
                           std::uint64_t height, std::uint64_t k = 3) {
    return {Kernel::conv, style, 0, width, height, k};
  }
};

struct CalibrationProfile {
  std::string name;
  double conv_cycles_per_pixel = 0;  // C_pixel, for a 3x3 kernel
  double conv_overhead = 0;          // C_0
  double huffman_sw_quadratic = 0;   // a
  double huffman_sw_linear = 0;      // b
  double huffman_sw_constant = 0;    // c
  double huffman_rs_per_node = 0;    // r
  double huffman_rs_latency = 0;     // L
};

inline CalibrationProfile paper_table_profile() {
  return {"paper-table", 68.0, 1.0, 27.0, 248.0, 1.0, 2.9, 36.0};
}

inline void validate_profile(const CalibrationProfile& p) {
  const double values[] = {p.conv_cycles_per_pixel, p.conv_overhead,
                           p.huffman_sw_quadratic,  p.huffman_sw_linear,
                           p.huffman_sw_constant,   p.huffman_rs_per_node,
                           p.huffman_rs_latency};
  for (double v : values) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw Error(ErrorKind::configuration,
                  "profile '" + p.name + "' has a non-positive constant");
    }
  }
}

inline CalibrationProfile profile_by_name(std::string_view name) {
  if (name == "paper-table") return paper_table_profile();
  throw Error(ErrorKind::configuration, "unknown profile '" + std::string(name) + "'");
}

inline CalibrationProfile profile_from_json(const nlohmann::json& j) {
  try {
    CalibrationProfile p;
    p.name = j.at("name").get<std::string>();
    p.conv_cycles_per_pixel = j.at("conv_cycles_per_pixel").get<double>();
    p.conv_overhead = j.at("conv_overhead").get<double>();
    p.huffman_sw_quadratic = j.at("huffman_sw_quadratic").get<double>();
    p.huffman_sw_linear = j.at("huffman_sw_linear").get<double>();
    p.huffman_sw_constant = j.at("huffman_sw_constant").get<double>();
    p.huffman_rs_per_node = j.at("huffman_rs_per_node").get<double>();
    p.huffman_rs_latency = j.at("huffman_rs_latency").get<double>();
    validate_profile(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::configuration, std::string("profile JSON: ") + e.what());
  }
}

struct CycleEstimate {
  std::uint64_t total_cycles = 0;
  // Pipeline fill, reported separately from the headline count.
  std::uint64_t latency = 0;
};

inline void validate_schedule(const LoopSchedule& s) {
  if (s.kernel == Kernel::huffman) {
    if (s.n < 2) {
      throw Error(ErrorKind::invalid_input, "huffman schedule needs n >= 2");
    }
    return;
  }
  if (s.width < 3 || s.height < 3) {
    throw Error(ErrorKind::invalid_input, "conv schedule needs width, height >= 3");
  }
  if (s.kernel_size < 3 || s.kernel_size % 2 == 0 || s.kernel_size > s.width ||
      s.kernel_size > s.height) {
    throw Error(ErrorKind::invalid_input, "conv kernel size must be odd, >= 3 and fit the image");
  }
}

inline CycleEstimate estimate_cycles(const LoopSchedule& s, const CalibrationProfile& p) {
  validate_schedule(s);
  validate_profile(p);
  auto round = [](double v) { return static_cast<std::uint64_t>(std::llround(v)); };
  if (s.kernel == Kernel::conv) {
    const std::uint64_t pixels = s.width * s.height;
    if (s.style == Style::restructured) return {pixels, s.width + 1};
    const double k2 = static_cast<double>(s.kernel_size * s.kernel_size) / 9.0;
    return {round(p.conv_cycles_per_pixel * k2 * static_cast<double>(pixels) + p.conv_overhead), 0};
  }
  const double n = static_cast<double>(s.n);
  if (s.style == Style::restructured) {
    return {round(p.huffman_rs_per_node * (2.0 * n - 1.0) + p.huffman_rs_latency), 0};
  }
  return {round(p.huffman_sw_quadratic * n * n + p.huffman_sw_linear * n + p.huffman_sw_constant), 0};
}

inline double throughput(const CycleEstimate& estimate, double freq_mhz) {
  if (!(freq_mhz > 0)) {
    throw Error(ErrorKind::invalid_input, "frequency must be positive");
  }
  if (estimate.total_cycles == 0) {
    throw Error(ErrorKind::invalid_input, "estimate has zero cycles");
  }
  return freq_mhz * 1e6 / static_cast<double>(estimate.total_cycles);
}

struct StyleResult {
  LoopSchedule schedule;
  CycleEstimate estimate;
  double freq_mhz = 0;
  double throughput = 0;
};

struct ComparisonReport {
  std::string profile;
  StyleResult first;   // software in compare()
  StyleResult second;  // restructured in compare()
  double cycle_ratio = 0;       // first / second
  double throughput_ratio = 0;  // first / second
};

inline ComparisonReport compare_schedules(const LoopSchedule& a, const LoopSchedule& b,
                                          const CalibrationProfile& profile,
                                          double freq_a_mhz, double freq_b_mhz) {
  ComparisonReport report;
  report.profile = profile.name;
  report.first = {a, estimate_cycles(a, profile), freq_a_mhz, 0};
  report.second = {b, estimate_cycles(b, profile), freq_b_mhz, 0};
  report.first.throughput = throughput(report.first.estimate, freq_a_mhz);
  report.second.throughput = throughput(report.second.estimate, freq_b_mhz);
  report.cycle_ratio = static_cast<double>(report.first.estimate.total_cycles) /
                       static_cast<double>(report.second.estimate.total_cycles);
  report.throughput_ratio = report.first.throughput / report.second.throughput;
  return report;
}

struct Sizes {
  std::uint64_t n = 0;
  std::uint64_t width = 0;
  std::uint64_t height = 0;
};

struct Frequencies {
  double software_mhz = 0;
  double restructured_mhz = 0;
};

/// Software vs restructured for one kernel at one size.
inline ComparisonReport compare(Kernel kernel, const Sizes& sizes,
                                const CalibrationProfile& profile,
                                const Frequencies& freqs) {
  auto schedule = [&](Style style) {
    return kernel == Kernel::huffman
               ? LoopSchedule::huffman(style, sizes.n)
               : LoopSchedule::conv(style, sizes.width, sizes.height);
  };
  return compare_schedules(schedule(Style::software), schedule(Style::restructured),
                           profile, freqs.software_mhz, freqs.restructured_mhz);
}

// ------------------------------------------------------------- reports ----

inline nlohmann::json estimate_report(const LoopSchedule& s, const CycleEstimate& e,
                                      const std::string& profile, double freq_mhz) {
  nlohmann::json j;
  j["schema"] = 1;
  j["kernel"] = std::string(to_string(s.kernel));
  j["style"] = std::string(to_string(s.style));
  j["cycles"] = e.total_cycles;
  j["latency"] = e.latency;
  j["freq_mhz"] = freq_mhz;
  j["throughput"] = throughput(e, freq_mhz);
  j["profile"] = profile;
  if (s.kernel == Kernel::huffman) {
    j["n"] = s.n;
  } else {
    j["width"] = s.width;
    j["height"] = s.height;
  }
  return j;
}

inline nlohmann::json comparison_report(const ComparisonReport& r) {
  nlohmann::json j;
  j["schema"] = 1;
  j["kernel"] = std::string(to_string(r.first.schedule.kernel));
  j["profile"] = r.profile;
  j["software"] = estimate_report(r.first.schedule, r.first.estimate, r.profile, r.first.freq_mhz);
  j["restructured"] =
      estimate_report(r.second.schedule, r.second.estimate, r.profile, r.second.freq_mhz);
  j["cycle_ratio"] = r.cycle_ratio;
  j["throughput_ratio"] = r.throughput_ratio;
  return j;
}

}  // namespace hlsr::cycle_model
