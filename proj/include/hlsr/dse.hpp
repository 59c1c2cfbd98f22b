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
 * @file dse.hpp
 * @brief Exhaustive design-space exploration over template parameters with
 * a (cycles, BRAM) Pareto frontier.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hlsr/codegen.hpp"
#include "hlsr/cycle_model.hpp"
#include "hlsr/error.hpp"

namespace hlsr::dse {

using codegen::TemplateId;
using cycle_model::Style;

using ParamValue = std::variant<std::int64_t, std::string>;

inline std::string to_string(const ParamValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

/// One concrete parameter assignment, in search-space order.
struct Assignment {
  std::vector<std::pair<std::string, ParamValue>> values;

  const ParamValue* find(const std::string& name) const {
    for (const auto& [k, v] : values) {
      if (k == name) return &v;
    }
    return nullptr;
  }

  std::int64_t integer(const std::string& name, std::int64_t fallback) const {
    const auto* v = find(name);
    if (!v) return fallback;
    if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
    throw Error(ErrorKind::validation, "parameter '" + name + "' must be an integer");
  }

  Style style() const {
    const auto* v = find("style");
    if (!v) return Style::restructured;
    if (const auto* s = std::get_if<std::string>(v)) return cycle_model::parse_style(*s);
    throw Error(ErrorKind::validation, "parameter 'style' must be a string");
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Metrics {
  std::uint64_t cycles = 0;
  std::uint64_t bram = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct DesignPoint {
  TemplateId id = TemplateId::conv2d_stream;
  Assignment params;
  Metrics metrics;

  friend bool operator==(const DesignPoint&, const DesignPoint&) = default;
};

inline constexpr std::uint64_t kDefaultPointLimit = 100000;

struct SearchSpace {
  TemplateId id = TemplateId::conv2d_stream;
  std::vector<std::pair<std::string, std::vector<ParamValue>>> params;
  std::uint64_t limit = kDefaultPointLimit;
};

// ----------------------------------------------------------- BRAM proxy ----

/// Arrays at or below register_threshold_bits map to registers/LUTs;
/// larger ones take ceil(bits / block_bits) 18Kb block RAMs each.
struct BramModel {
  std::uint64_t block_bits = 18 * 1024;
  std::uint64_t register_threshold_bits = 1024;
};

inline std::uint64_t blocks_for_array(std::uint64_t bits, const BramModel& model) {
  if (bits <= model.register_threshold_bits) return 0;
  return (bits + model.block_bits - 1) / model.block_bits;
}

inline std::uint64_t estimate_bram(TemplateId id, const Assignment& params,
                                   const BramModel& model = {}) {
  const Style style = params.style();
  if (id == TemplateId::huffman_tree) {
    // fixed architectures, measured rather than modeled
    return style == Style::restructured ? 2 : 9;
  }
  if (style == Style::software) return 0;
  const auto k = params.integer("k", 3);
  const auto width = params.integer("width", 0);
  const auto bits = params.integer("pixel_bits", 8);
  if (k < 1 || width < 1 || bits < 1) {
    throw Error(ErrorKind::validation, "BRAM estimate needs positive k, width, pixel_bits");
  }
  // one memory per line-buffer row
  return static_cast<std::uint64_t>(k) *
         blocks_for_array(static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(bits), model);
}

inline std::uint64_t estimate_cycles(TemplateId id, const Assignment& params,
                                     const cycle_model::CalibrationProfile& profile) {
  const Style style = params.style();
  if (id == TemplateId::huffman_tree) {
    const auto n = params.integer("n", 0);
    if (n < 2) throw Error(ErrorKind::validation, "huffman design point needs n >= 2");
    return cycle_model::estimate_cycles(
               cycle_model::LoopSchedule::huffman(style, static_cast<std::uint64_t>(n)), profile)
        .total_cycles;
  }
  const auto w = params.integer("width", 0);
  const auto h = params.integer("height", 0);
  const auto k = params.integer("k", 3);
  if (w < 1 || h < 1 || k < 1) throw Error(ErrorKind::validation, "conv design point needs positive width, height, k");
  return cycle_model::estimate_cycles(
             cycle_model::LoopSchedule::conv(style, static_cast<std::uint64_t>(w),
                                             static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(k)),
             profile)
      .total_cycles;
}

// ------------------------------------------------------------- explore ----

inline std::uint64_t space_size(const SearchSpace& space) {
  if (space.params.empty()) throw Error(ErrorKind::validation, "search space has no parameters");
  std::uint64_t size = 1;
  for (const auto& [name, values] : space.params) {
    if (values.empty()) throw Error(ErrorKind::validation, "parameter '" + name + "' has an empty value list");
    if (__builtin_mul_overflow(size, static_cast<std::uint64_t>(values.size()), &size)) {
      throw Error(ErrorKind::limit, "search space size overflows");
    }
  }
  return size;
}

/// Evaluates every point of the cartesian product, last parameter varying
/// fastest.
inline std::vector<DesignPoint> explore(const SearchSpace& space,
                                        const cycle_model::CalibrationProfile& profile,
                                        const BramModel& bram_model = {}) {
  const std::uint64_t size = space_size(space);
  if (size > space.limit) {
    throw Error(ErrorKind::limit, "search space has " + std::to_string(size) +
                                      " points, limit is " + std::to_string(space.limit));
  }
  std::vector<DesignPoint> points;
  points.reserve(size);
  std::vector<std::size_t> idx(space.params.size(), 0);
  for (std::uint64_t p = 0; p < size; ++p) {
    DesignPoint point;
    point.id = space.id;
    for (std::size_t d = 0; d < space.params.size(); ++d) {
      point.params.values.emplace_back(space.params[d].first, space.params[d].second[idx[d]]);
    }
    point.metrics.cycles = estimate_cycles(space.id, point.params, profile);
    point.metrics.bram = estimate_bram(space.id, point.params, bram_model);
    points.push_back(std::move(point));
    for (std::size_t d = space.params.size(); d-- > 0;) {
      if (++idx[d] < space.params[d].second.size()) break;
      idx[d] = 0;
    }
  }
  return points;
}

// -------------------------------------------------------------- pareto ----

inline bool dominates(const Metrics& a, const Metrics& b) {
  return a.cycles <= b.cycles && a.bram <= b.bram && (a.cycles < b.cycles || a.bram < b.bram);
}

/// Indices of the non-dominated points, in input order. Points with
/// identical metrics are represented once, by the first occurrence.
inline std::vector<std::size_t> pareto_indices(const std::vector<DesignPoint>& points) {
  if (points.empty()) throw Error(ErrorKind::invalid_input, "pareto frontier of an empty point set");
  // sort by (cycles, bram, index), sweep keeping strictly decreasing bram
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ma = points[a].metrics;
    const auto& mb = points[b].metrics;
    if (ma.cycles != mb.cycles) return ma.cycles < mb.cycles;
    if (ma.bram != mb.bram) return ma.bram < mb.bram;
    return a < b;
  });
  std::vector<std::size_t> frontier;
  bool any = false;
  std::uint64_t best_bram = 0;
  for (const std::size_t i : order) {
    const auto& m = points[i].metrics;
    if (!any || m.bram < best_bram) {
      frontier.push_back(i);
      best_bram = m.bram;
      any = true;
    }
  }
  std::sort(frontier.begin(), frontier.end());
  return frontier;
}

inline std::vector<DesignPoint> pareto(const std::vector<DesignPoint>& points) {
  std::vector<DesignPoint> out;
  for (const std::size_t i : pareto_indices(points)) out.push_back(points[i]);
  return out;
}

// ----------------------------------------------------------------- I/O ----

inline SearchSpace space_from_json(const nlohmann::ordered_json& j) {
  try {
    SearchSpace space;
    space.id = codegen::parse_template_id(j.at("template").get<std::string>());
    space.limit = j.value("limit", kDefaultPointLimit);
    for (const auto& [name, list] : j.at("params").items()) {
      if (!list.is_array()) throw Error(ErrorKind::validation, "parameter '" + name + "' must be a list");
      std::vector<ParamValue> values;
      for (const auto& v : list) {
        if (v.is_number_integer()) {
          values.emplace_back(v.get<std::int64_t>());
        } else if (v.is_string()) {
          values.emplace_back(v.get<std::string>());
        } else {
          throw Error(ErrorKind::validation, "parameter '" + name + "' values must be integers or strings");
        }
      }
      space.params.emplace_back(name, std::move(values));
    }
    return space;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::validation, std::string("search space: ") + e.what());
  }
}

inline std::string format_results_csv(const SearchSpace& space, const std::vector<DesignPoint>& points) {
  std::vector<bool> on_frontier(points.size(), false);
  if (!points.empty()) {
    for (const std::size_t i : pareto_indices(points)) on_frontier[i] = true;
  }
  std::string out;
  for (const auto& [name, values] : space.params) out += name + ",";
  out += "cycles,bram,on_frontier\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (const auto& [name, v] : points[i].params.values) out += to_string(v) + ",";
    out += std::to_string(points[i].metrics.cycles) + "," + std::to_string(points[i].metrics.bram) + "," +
           (on_frontier[i] ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace hlsr::dse
