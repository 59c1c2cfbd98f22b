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

// Builds generated template sources with the C compiler in harness mode and
// runs them on fixtures.
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hlsr/codegen.hpp"
#include "hlsr/huffman.hpp"
#include "support/oracles.hpp"

namespace hlsr::testing {

inline std::filesystem::path harness_source(const char* name) {
  return std::filesystem::path(HLSR_HARNESS_DIR) / name;
}

/// Generated conv2d_stream compiled and executed on `pixels`; nullopt if the
/// build or run failed.
inline std::optional<std::vector<std::int32_t>> run_generated_conv(const codegen::ConvParams& params,
                                                                   const std::vector<std::uint8_t>& pixels,
                                                                   const std::string& tag) {
  namespace fs = std::filesystem;
  const fs::path dir = scratch_dir("conv_" + tag);
  codegen::write_generated(codegen::instantiate(codegen::TemplateId::conv2d_stream, params), dir);
  const fs::path exe = dir / "conv_harness";
  if (compile_c({dir / "conv2d_stream.c", harness_source("conv_harness.c")}, dir, exe) != 0) return std::nullopt;
  {
    std::ofstream img(dir / "image.bin", std::ios::binary);
    img.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  }
  const std::string cmd = exe.string() + " " + (dir / "image.bin").string() + " " + (dir / "out.txt").string();
  if (std::system(cmd.c_str()) != 0) return std::nullopt;
  std::vector<std::int32_t> out;
  std::ifstream in(dir / "out.txt");
  for (std::int32_t v; in >> v;) out.push_back(v);
  fs::remove_all(dir);
  return out;
}

inline std::optional<huffman::BitLengthTable> run_generated_huffman(const huffman::SortedFreqTable& table,
                                                                    const std::string& tag) {
  namespace fs = std::filesystem;
  const fs::path dir = scratch_dir("huff_" + tag);
  codegen::HuffmanParams params;
  params.n = static_cast<int>(table.size());
  params.symbol_bits = 32;
  params.freq_bits = 32;
  codegen::write_generated(codegen::instantiate(codegen::TemplateId::huffman_tree, params), dir);
  const fs::path exe = dir / "huffman_harness";
  if (compile_c({dir / "huffman_tree.c", harness_source("huffman_harness.c")}, dir, exe) != 0) return std::nullopt;
  {
    std::ofstream t(dir / "table.txt");
    for (const auto& e : table.entries()) t << e.symbol << " " << e.freq << "\n";
  }
  const std::string cmd = exe.string() + " " + (dir / "table.txt").string() + " " + (dir / "lengths.txt").string();
  if (std::system(cmd.c_str()) != 0) return std::nullopt;
  huffman::BitLengthTable lengths;
  std::ifstream in(dir / "lengths.txt");
  for (unsigned long s, l; in >> s >> l;) lengths[static_cast<huffman::Symbol>(s)] = static_cast<std::uint32_t>(l);
  fs::remove_all(dir);
  return lengths;
}

}  // namespace hlsr::testing
