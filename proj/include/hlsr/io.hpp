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

// File formats: binary PGM (P5, maxval 255), headered CSV tables and the
// JSON coefficient file.
#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hlsr/error.hpp"
#include "hlsr/huffman.hpp"
#include "hlsr/stencil.hpp"

namespace hlsr::io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

// ---------------------------------------------------------------- PGM ----

inline stencil::Image parse_pgm(std::string_view data) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < data.size()) {
      if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* what) -> std::size_t {
    skip_space_and_comments();
    std::size_t value = 0;
    const auto [end, ec] =
        std::from_chars(data.data() + pos, data.data() + data.size(), value);
    if (ec != std::errc{}) {
      throw Error(ErrorKind::invalid_input,
                  std::string("malformed PGM: bad ") + what);
    }
    pos = static_cast<std::size_t>(end - data.data());
    return value;
  };

  if (data.size() < 2 || data.substr(0, 2) != "P5") {
    throw Error(ErrorKind::invalid_input, "malformed PGM: expected P5 magic");
  }
  pos = 2;
  const std::size_t width = read_uint("width");
  const std::size_t height = read_uint("height");
  const std::size_t maxval = read_uint("maxval");
  if (maxval != 255) {
    throw Error(ErrorKind::invalid_input,
                "unsupported PGM maxval " + std::to_string(maxval));
  }
  if (pos >= data.size() ||
      !std::isspace(static_cast<unsigned char>(data[pos]))) {
    throw Error(ErrorKind::invalid_input, "malformed PGM: missing header end");
  }
  ++pos;
  if (width == 0 || height == 0 || data.size() - pos < width * height) {
    throw Error(ErrorKind::invalid_input, "malformed PGM: truncated pixel data");
  }
  std::vector<std::uint8_t> pixels(data.begin() + static_cast<std::ptrdiff_t>(pos),
                                   data.begin() + static_cast<std::ptrdiff_t>(pos + width * height));
  return stencil::Image(width, height, std::move(pixels));
}

inline std::string format_pgm(const stencil::Image& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  return out;
}

inline stencil::Image read_pgm(const std::filesystem::path& path) {
  return parse_pgm(read_file(path));
}

inline void write_pgm(const std::filesystem::path& path, const stencil::Image& image) {
  write_file(path, format_pgm(image));
}

/// Clamp a response image to 8-bit for display.
inline stencil::Image to_display_image(const stencil::ResponseImage& response) {
  std::vector<std::uint8_t> px(response.values.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = static_cast<std::uint8_t>(std::clamp(response.values[i], 0, 255));
  }
  return stencil::Image(response.width, response.height, std::move(px));
}

// ---------------------------------------------------------------- CSV ----

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Plain comma-separated values; no quoting, which none of our tables need.
inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(trim(std::string_view(line).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size()) {
        throw Error(ErrorKind::invalid_input,
                    "CSV row has " + std::to_string(fields.size()) +
                        " fields, header has " +
                        std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

template <typename T>
T parse_number(std::string_view field, std::string_view what) {
  T value{};
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || end != field.data() + field.size()) {
    throw Error(ErrorKind::invalid_input,
                "bad " + std::string(what) + " value '" + std::string(field) + "'");
  }
  return value;
}

inline huffman::SortedFreqTable parse_freq_csv(std::string_view text) {
  const CsvTable csv = parse_csv(text);
  if (csv.header != std::vector<std::string>{"symbol", "freq"}) {
    throw Error(ErrorKind::invalid_input, "frequency CSV header must be 'symbol,freq'");
  }
  std::vector<huffman::SymbolFreq> entries;
  entries.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    entries.push_back({parse_number<huffman::Symbol>(row[0], "symbol"),
                       parse_number<huffman::Frequency>(row[1], "freq")});
  }
  return huffman::SortedFreqTable(std::move(entries));
}

inline std::string format_freq_csv(const huffman::SortedFreqTable& table) {
  std::string out = "symbol,freq\n";
  for (const auto& e : table.entries()) {
    out += std::to_string(e.symbol) + "," + std::to_string(e.freq) + "\n";
  }
  return out;
}

inline std::string format_lengths_csv(const huffman::BitLengthTable& lengths) {
  std::string out = "symbol,length\n";
  for (const auto& [sym, len] : lengths) {
    out += std::to_string(sym) + "," + std::to_string(len) + "\n";
  }
  return out;
}

inline std::string format_arrays_csv(const huffman::HuffmanTreeArrays& arrays) {
  auto ref = [](const huffman::NodeRef& r) {
    return r.internal ? std::string("internal") : "leaf:" + std::to_string(r.symbol);
  };
  std::string out = "node,left,right,parent_address\n";
  for (std::size_t t = 0; t < arrays.num_internal; ++t) {
    out += std::to_string(t) + "," + ref(arrays.left[t]) + "," + ref(arrays.right[t]) + ",";
    if (arrays.parent_address[t]) out += std::to_string(*arrays.parent_address[t]);
    out += "\n";
  }
  return out;
}

inline std::string format_response_csv(const stencil::ResponseImage& response) {
  std::string out = "row,col,value\n";
  for (std::size_t r = 0; r < response.height; ++r) {
    for (std::size_t c = 0; c < response.width; ++c) {
      out += std::to_string(r) + "," + std::to_string(c) + "," +
             std::to_string(response.at(r, c)) + "\n";
    }
  }
  return out;
}

// --------------------------------------------------------- coefficients ----

inline stencil::Coeffs3x3 coeffs_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
    throw Error(ErrorKind::invalid_input,
                std::string("coefficient file needs a 3x3 array '") + key + "'");
  }
  std::array<std::array<int, 3>, 3> c{};
  for (std::size_t r = 0; r < 3; ++r) {
    const auto& row = j[key][r];
    if (!row.is_array() || row.size() != 3) {
      throw Error(ErrorKind::invalid_input,
                  std::string("row ") + std::to_string(r) + " of '" + key +
                      "' must have 3 integers");
    }
    for (std::size_t col = 0; col < 3; ++col) {
      if (!row[col].is_number_integer()) {
        throw Error(ErrorKind::invalid_input,
                    std::string("'") + key + "' entries must be integers");
      }
      c[r][col] = row[col].get<int>();
    }
  }
  return stencil::make_coeffs(c);
}

struct KernelPair {
  stencil::Coeffs3x3 gx;
  stencil::Coeffs3x3 gy;
};

inline KernelPair parse_kernel_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::invalid_input, std::string("coefficient JSON: ") + e.what());
  }
  return {coeffs_from_json(j, "gx"), coeffs_from_json(j, "gy")};
}

/// "sobel-standard", "sobel-paper", or a path to a coefficient JSON file.
inline KernelPair resolve_kernel(const std::string& name) {
  if (name == "sobel-standard") {
    return {stencil::SOBEL_GX_STANDARD, stencil::SOBEL_GY_STANDARD};
  }
  if (name == "sobel-paper") {
    return {stencil::SOBEL_GX_PAPER, stencil::SOBEL_GY_PAPER};
  }
  return parse_kernel_json(read_file(name));
}

}  // namespace hlsr::io
