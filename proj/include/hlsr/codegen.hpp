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
 * @file codegen.hpp
 * @brief Domain-specific HLS templates: emits restructured HLS-C for a
 * streaming KxK convolution and for array-based Huffman tree creation.
 *
 * Templates are plain text with `{{SLOT}}` substitution. The emitted C is
 * also valid plain C: compiled with -DHLS_HARNESS the pragmas are inert and
 * large buffers are heap-allocated, so the generated code can be executed
 * and compared against the simulators in this library.
 */
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hlsr/error.hpp"
#include "hlsr/io.hpp"
#include "hlsr/stencil.hpp"

namespace hlsr::codegen {

enum class TemplateId { conv2d_stream, huffman_tree };

constexpr std::string_view to_string(TemplateId id) {
  return id == TemplateId::conv2d_stream ? "conv2d_stream" : "huffman_tree";
}

inline TemplateId parse_template_id(std::string_view s) {
  if (s == "conv2d_stream" || s == "conv") return TemplateId::conv2d_stream;
  if (s == "huffman_tree" || s == "huffman") return TemplateId::huffman_tree;
  throw Error(ErrorKind::validation, "unknown template '" + std::string(s) + "'");
}

// Regular kernels have static loop bounds and direct addressing; irregular
// ones have data-dependent bounds or indirect accesses.
enum class KernelClass { regular, irregular };

constexpr KernelClass kernel_class(TemplateId id) {
  return id == TemplateId::conv2d_stream ? KernelClass::regular : KernelClass::irregular;
}

using CoefficientSet = std::vector<std::vector<int>>;  // K x K

struct ConvParams {
  int k = 3;
  int width = 0;
  int height = 0;
  // Output = sum over sets of the window dot product; empty means the
  // standard Sobel pair (K = 3 only).
  std::vector<CoefficientSet> coefficient_sets;
  int pixel_bits = 8;
};

struct HuffmanParams {
  int n = 0;
  int symbol_bits = 16;
  int freq_bits = 32;
};

using TemplateParams = std::variant<ConvParams, HuffmanParams>;

struct ValidationIssue {
  std::string param;
  std::string message;

  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

namespace detail {

inline bool valid_bits(int bits) { return bits == 8 || bits == 16 || bits == 32; }

inline std::vector<CoefficientSet> sobel_sets() {
  auto to_set = [](const stencil::Coeffs3x3& c) {
    CoefficientSet s(3, std::vector<int>(3));
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t col = 0; col < 3; ++col) s[r][col] = c(r, col);
    }
    return s;
  };
  return {to_set(stencil::SOBEL_GX_STANDARD), to_set(stencil::SOBEL_GY_STANDARD)};
}

inline std::string uint_type(int bits) { return "uint" + std::to_string(bits) + "_t"; }

inline std::string render(std::string_view text, const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    const auto close = text.find("}}", open);
    if (close == std::string_view::npos) {
      throw Error(ErrorKind::validation, "unterminated template slot");
    }
    out.append(text.substr(pos, open - pos));
    const std::string name(text.substr(open + 2, close - open - 2));
    const auto it = slots.find(name);
    if (it == slots.end()) {
      throw Error(ErrorKind::validation, "template slot '" + name + "' has no value");
    }
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

}  // namespace detail

inline std::vector<ValidationIssue> validate_params(TemplateId id, const TemplateParams& params) {
  std::vector<ValidationIssue> issues;
  auto issue = [&](std::string param, std::string message) {
    issues.push_back({std::move(param), std::move(message)});
  };

  if (id == TemplateId::conv2d_stream) {
    const auto* p = std::get_if<ConvParams>(&params);
    if (!p) {
      issue("template", "conv2d_stream expects convolution parameters");
      return issues;
    }
    if (p->k < 3) issue("k", "K must be >= 3");
    if (p->k % 2 == 0) issue("k", "K must be odd");
    if (p->width < p->k) issue("width", "width must be >= K");
    if (p->height < p->k) issue("height", "height must be >= K");
    if (!detail::valid_bits(p->pixel_bits)) {
      issue("pixel_bits", "pixel_bits must be one of 8, 16, 32");
    }
    if (p->coefficient_sets.empty() && p->k != 3) {
      issue("coefficients", "coefficient sets are required when K != 3");
    }
    for (std::size_t s = 0; s < p->coefficient_sets.size(); ++s) {
      const auto& set = p->coefficient_sets[s];
      bool square = set.size() == static_cast<std::size_t>(p->k);
      for (const auto& row : set) square = square && row.size() == static_cast<std::size_t>(p->k);
      if (!square) {
        issue("coefficients", "coefficient set " + std::to_string(s) + " must be K x K");
      }
    }
    return issues;
  }

  const auto* p = std::get_if<HuffmanParams>(&params);
  if (!p) {
    issue("template", "huffman_tree expects Huffman parameters");
    return issues;
  }
  if (p->n < 2) issue("n", "n must satisfy n ≥ 2");
  if (!detail::valid_bits(p->symbol_bits)) {
    issue("symbol_bits", "symbol_bits must be one of 8, 16, 32");
  } else if (p->symbol_bits < 32 && p->n >= 2 &&
             static_cast<std::uint64_t>(p->n) > (std::uint64_t{1} << p->symbol_bits) - 1) {
    // the all-ones symbol value is reserved as the internal-node marker
    issue("n", "n does not fit symbol_bits (all-ones value is reserved)");
  }
  if (!detail::valid_bits(p->freq_bits)) issue("freq_bits", "freq_bits must be one of 8, 16, 32");
  return issues;
}

inline void require_valid(TemplateId id, const TemplateParams& params) {
  const auto issues = validate_params(id, params);
  if (issues.empty()) return;
  std::string message = "invalid " + std::string(to_string(id)) + " parameters:";
  for (const auto& i : issues) message += " " + i.param + ": " + i.message + ";";
  throw Error(ErrorKind::validation, message);
}

struct GeneratedFile {
  std::string name;
  std::string text;
};

struct GeneratedSource {
  TemplateId id = TemplateId::conv2d_stream;
  std::vector<GeneratedFile> files;
  nlohmann::ordered_json manifest;
};

// ------------------------------------------------------------ templates ----

inline constexpr std::string_view kConvHeader = R"(/* Generated by hlsr codegen: conv2d_stream K={{K}} {{WIDTH}}x{{HEIGHT}} */
#ifndef CONV2D_STREAM_H
#define CONV2D_STREAM_H

#include <stdint.h>

#define CONV_K {{K}}
#define CONV_WIDTH {{WIDTH}}
#define CONV_HEIGHT {{HEIGHT}}
#define CONV_PIXELS {{PIXELS}}
#define CONV_SETS {{SETS}}

typedef {{PIXEL_T}} pixel_t;

void conv2d_stream(const pixel_t image[{{PIXELS}}], int32_t out[{{PIXELS}}]);

#endif
)";

inline constexpr std::string_view kConvSource = R"(/* Generated by hlsr codegen: conv2d_stream K={{K}} {{WIDTH}}x{{HEIGHT}} */
#include "conv2d_stream.h"
#ifdef HLS_HARNESS
#include <stdlib.h>
#endif

static const int32_t COEFF[{{SETS}}][{{K}}][{{K}}] = {
{{COEFFS}}};

/* Line buffer of {{K}} image rows feeding a {{K}}x{{K}} window register.
 * One pixel enters per iteration; the window center trails the input by
 * {{HALF}} rows and {{HALF}} columns, so output starts after {{LATENCY}} pixels. */
void conv2d_stream(const pixel_t image[{{PIXELS}}], int32_t out[{{PIXELS}}]) {
#ifdef HLS_HARNESS
  pixel_t (*LineBuffer)[{{WIDTH}}] = calloc({{K}}, sizeof(pixel_t[{{WIDTH}}]));
#else
  static pixel_t LineBuffer[{{K}}][{{WIDTH}}];
#endif
  int32_t WindowBuffer[{{K}}][{{K}}] = {{ZERO_INIT}};

  for (uint32_t p = 0; p < {{PIXELS}}; p++) {
#pragma HLS PIPELINE II=1
    const uint32_t col = p % {{WIDTH}};
    pixel_t column[{{K}}];
    for (int r = 0; r < {{K_MINUS_1}}; r++) {
      column[r] = LineBuffer[r + 1][col];
    }
    column[{{K_MINUS_1}}] = image[p];
    for (int r = 0; r < {{K}}; r++) {
      LineBuffer[r][col] = column[r];
    }

    for (int r = 0; r < {{K}}; r++) {
      for (int c = 0; c < {{K_MINUS_1}}; c++) {
        WindowBuffer[r][c] = WindowBuffer[r][c + 1];
      }
      WindowBuffer[r][{{K_MINUS_1}}] = column[r];
    }

    if (p >= {{LATENCY}}) {
      const uint32_t center = p - {{LATENCY}};
      const uint32_t crow = center / {{WIDTH}};
      const uint32_t ccol = center % {{WIDTH}};
      int32_t value = 0;
      if (crow >= {{HALF}} && crow < {{ROW_LIMIT}} && ccol >= {{HALF}} && ccol < {{COL_LIMIT}}) {
        for (int s = 0; s < {{SETS}}; s++) {
          for (int r = 0; r < {{K}}; r++) {
            for (int c = 0; c < {{K}}; c++) {
              value += WindowBuffer[r][c] * COEFF[s][r][c];
            }
          }
        }
      }
      out[center] = value;
    }
  }

  /* trailing centers never enter the window; all are border positions */
  for (uint32_t c = {{TAIL_START}}; c < {{PIXELS}}; c++) {
    out[c] = 0;
  }
#ifdef HLS_HARNESS
  free(LineBuffer);
#endif
}
)";

inline constexpr std::string_view kHuffmanHeader = R"(/* Generated by hlsr codegen: huffman_tree n={{N}} */
#ifndef HUFFMAN_TREE_H
#define HUFFMAN_TREE_H

#include <stdint.h>

#define HUFF_SYMBOLS {{N}}
#define HUFF_NODES {{NODES}}
#define HUFF_INTERNAL (({{SYMBOL_T}}){{MARKER}})
#define HUFF_NO_PARENT {{NODES}}

typedef {{SYMBOL_T}} symbol_t;
typedef {{FREQ_T}} freq_t;
typedef uint32_t addr_t;

void HuffmanCreateTree(const symbol_t SF_S[{{N}}], const freq_t SF_F[{{N}}],
                       addr_t ParentAddress[{{NODES}}],
                       symbol_t Left[{{NODES}}], symbol_t Right[{{NODES}}]);

void HuffmanNodeDepth(const addr_t ParentAddress[{{NODES}}], uint32_t Depth[{{NODES}}]);

#endif
)";

inline constexpr std::string_view kHuffmanSource = R"(/* Generated by hlsr codegen: huffman_tree n={{N}} */
#include "huffman_tree.h"

/* SF must be sorted by nondecreasing frequency. Internal nodes are appended
 * to IN in creation order, which keeps IN sorted as well; each child is the
 * smaller head of SF and IN, preferring SF on ties. */
void HuffmanCreateTree(const symbol_t SF_S[{{N}}], const freq_t SF_F[{{N}}],
                       addr_t ParentAddress[{{NODES}}],
                       symbol_t Left[{{NODES}}], symbol_t Right[{{NODES}}]) {
  freq_t IN[{{NODES}}];
  addr_t i = 0;
  addr_t j = 0;
  addr_t k = 0;

  while (i < {{N}}) {
#pragma HLS PIPELINE II=1
    freq_t left_freq;
    freq_t right_freq;
    if (j == k || SF_F[i] <= IN[j]) {
      Left[k] = SF_S[i];
      left_freq = SF_F[i];
      i = i + 1;
    } else {
      Left[k] = HUFF_INTERNAL;
      left_freq = IN[j];
      ParentAddress[j] = k;
      j = j + 1;
    }
    if (i < {{N}} && (j == k || SF_F[i] <= IN[j])) {
      Right[k] = SF_S[i];
      right_freq = SF_F[i];
      i = i + 1;
    } else {
      Right[k] = HUFF_INTERNAL;
      right_freq = IN[j];
      ParentAddress[j] = k;
      j = j + 1;
    }
    IN[k] = left_freq + right_freq;
    k = k + 1;
  }

  while (j + 1 < k) {
#pragma HLS PIPELINE II=1
    freq_t freq = IN[j];
    Left[k] = HUFF_INTERNAL;
    ParentAddress[j] = k;
    j = j + 1;
    freq = freq + IN[j];
    Right[k] = HUFF_INTERNAL;
    ParentAddress[j] = k;
    j = j + 1;
    IN[k] = freq;
    k = k + 1;
  }

  ParentAddress[{{ROOT}}] = HUFF_NO_PARENT;
}

/* Parents are created after their children, so one backward sweep gives
 * every node its depth. A leaf child of node t has bit length Depth[t] + 1. */
void HuffmanNodeDepth(const addr_t ParentAddress[{{NODES}}], uint32_t Depth[{{NODES}}]) {
  Depth[{{ROOT}}] = 0;
  for (int32_t t = {{ROOT}} - 1; t >= 0; t--) {
    Depth[t] = Depth[ParentAddress[t]] + 1;
  }
}
)";

// ------------------------------------------------------- instantiation ----

inline nlohmann::ordered_json params_to_json(TemplateId id, const TemplateParams& params) {
  nlohmann::ordered_json j;
  j["template"] = std::string(to_string(id));
  if (const auto* p = std::get_if<ConvParams>(&params)) {
    j["k"] = p->k;
    j["width"] = p->width;
    j["height"] = p->height;
    j["pixel_bits"] = p->pixel_bits;
    j["coefficients"] = p->coefficient_sets.empty() ? detail::sobel_sets() : p->coefficient_sets;
  } else {
    const auto& h = std::get<HuffmanParams>(params);
    j["n"] = h.n;
    j["symbol_bits"] = h.symbol_bits;
    j["freq_bits"] = h.freq_bits;
  }
  return j;
}

inline TemplateParams params_from_json(TemplateId id, const nlohmann::json& j) {
  try {
    if (id == TemplateId::conv2d_stream) {
      ConvParams p;
      p.k = j.value("k", 3);
      p.width = j.at("width").get<int>();
      p.height = j.at("height").get<int>();
      p.pixel_bits = j.value("pixel_bits", 8);
      if (j.contains("coefficients")) {
        p.coefficient_sets = j.at("coefficients").get<std::vector<CoefficientSet>>();
      }
      return p;
    }
    HuffmanParams p;
    p.n = j.at("n").get<int>();
    p.symbol_bits = j.value("symbol_bits", 16);
    p.freq_bits = j.value("freq_bits", 32);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::validation, std::string("template parameters: ") + e.what());
  }
}

namespace detail {

inline GeneratedSource instantiate_conv(const ConvParams& p) {
  const auto sets = p.coefficient_sets.empty() ? sobel_sets() : p.coefficient_sets;
  const int half = p.k / 2;
  const long long pixels = static_cast<long long>(p.width) * p.height;
  const long long latency = static_cast<long long>(half) * p.width + half;

  std::string coeffs;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    coeffs += "  {";
    for (std::size_t r = 0; r < sets[s].size(); ++r) {
      coeffs += r == 0 ? "{" : ", {";
      for (std::size_t c = 0; c < sets[s][r].size(); ++c) {
        if (c) coeffs += ", ";
        coeffs += std::to_string(sets[s][r][c]);
      }
      coeffs += "}";
    }
    coeffs += s + 1 < sets.size() ? "},\n" : "}\n";
  }

  const std::map<std::string, std::string> slots{
      {"K", std::to_string(p.k)},
      {"K_MINUS_1", std::to_string(p.k - 1)},
      {"HALF", std::to_string(half)},
      {"WIDTH", std::to_string(p.width)},
      {"HEIGHT", std::to_string(p.height)},
      {"PIXELS", std::to_string(pixels)},
      {"SETS", std::to_string(sets.size())},
      {"PIXEL_T", uint_type(p.pixel_bits)},
      {"COEFFS", coeffs},
      {"LATENCY", std::to_string(latency)},
      {"ROW_LIMIT", std::to_string(p.height - half)},
      {"COL_LIMIT", std::to_string(p.width - half)},
      {"TAIL_START", std::to_string(pixels - latency)},
      {"ZERO_INIT", "{{0}}"},
  };
  GeneratedSource out;
  out.id = TemplateId::conv2d_stream;
  out.files.push_back({"conv2d_stream.h", render(kConvHeader, slots)});
  out.files.push_back({"conv2d_stream.c", render(kConvSource, slots)});
  return out;
}

inline GeneratedSource instantiate_huffman(const HuffmanParams& p) {
  const std::uint64_t marker =
      p.symbol_bits == 32 ? 0xFFFFFFFFull : (std::uint64_t{1} << p.symbol_bits) - 1;
  char marker_hex[32];
  std::snprintf(marker_hex, sizeof marker_hex, "0x%llXu", static_cast<unsigned long long>(marker));
  const std::map<std::string, std::string> slots{
      {"N", std::to_string(p.n)},
      {"NODES", std::to_string(p.n - 1)},
      {"ROOT", std::to_string(p.n - 2)},
      {"SYMBOL_T", uint_type(p.symbol_bits)},
      {"FREQ_T", uint_type(p.freq_bits)},
      {"MARKER", marker_hex},
  };
  GeneratedSource out;
  out.id = TemplateId::huffman_tree;
  out.files.push_back({"huffman_tree.h", render(kHuffmanHeader, slots)});
  out.files.push_back({"huffman_tree.c", render(kHuffmanSource, slots)});
  return out;
}

}  // namespace detail

inline GeneratedSource instantiate(TemplateId id, const TemplateParams& params) {
  require_valid(id, params);
  GeneratedSource out = id == TemplateId::conv2d_stream
                            ? detail::instantiate_conv(std::get<ConvParams>(params))
                            : detail::instantiate_huffman(std::get<HuffmanParams>(params));
  out.manifest["schema"] = 1;
  out.manifest["template"] = std::string(to_string(id));
  out.manifest["kernel_class"] =
      kernel_class(id) == KernelClass::regular ? "regular" : "irregular";
  out.manifest["params"] = params_to_json(id, params);
  out.manifest["files"] = nlohmann::ordered_json::array();
  for (const auto& f : out.files) out.manifest["files"].push_back(f.name);
  return out;
}

inline std::string manifest_text(const GeneratedSource& source) {
  return source.manifest.dump(2) + "\n";
}

inline void write_generated(const GeneratedSource& source, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& f : source.files) io::write_file(dir / f.name, f.text);
  io::write_file(dir / "manifest.json", manifest_text(source));
}

/// Number of non-overlapping occurrences of needle in text.
inline std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace hlsr::codegen
