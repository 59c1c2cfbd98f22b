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

// Streams a synthetic 640x480 frame through a conv -> threshold pipeline and
// prints the simulated and estimated cycle counts.

#include <cstdio>

#include "hlsr.hpp"

int main() {
  using namespace hlsr;
  constexpr std::size_t kWidth = 640;
  constexpr std::size_t kHeight = 480;

  std::vector<std::uint8_t> px(kWidth * kHeight);
  for (std::size_t r = 0; r < kHeight; ++r) {
    for (std::size_t c = 0; c < kWidth; ++c) {
      // a bright disc on a dark background
      const long dr = static_cast<long>(r) - 240;
      const long dc = static_cast<long>(c) - 320;
      px[r * kWidth + c] = dr * dr + dc * dc < 150 * 150 ? 200 : 30;
    }
  }
  const stencil::Image image(kWidth, kHeight, px);

  const auto streamed = stencil::convolve_streaming(image, stencil::SOBEL_GX_STANDARD,
                                                    stencil::SOBEL_GY_STANDARD);
  std::printf("streaming pushes: %zu (one per cycle), outputs: %zu\n", streamed.pushes, streamed.emitted);

  dataflow::StreamGraph g;
  dataflow::KernelInstance conv{.id = "sobel", .kind = dataflow::KernelKind::conv2d_stream};
  conv.conv.width = kWidth;
  conv.conv.height = kHeight;
  dataflow::KernelInstance thr{.id = "edges", .kind = dataflow::KernelKind::threshold};
  thr.threshold.threshold = 100;
  g.instances = {conv, thr};
  g.inputs = {"frame"};
  g.outputs = {"mask"};
  g.channels = {{dataflow::Endpoint::input("frame"), dataflow::Endpoint::at("sobel", "in"), 4},
                {dataflow::Endpoint::at("sobel", "out"), dataflow::Endpoint::at("edges", "in"), 4},
                {dataflow::Endpoint::at("edges", "out"), dataflow::Endpoint::output("mask"), 4}};
  g.pattern = dataflow::PipelinePattern{{"sobel", "edges"}};

  const auto run = dataflow::run_functional(g, {{"frame", {px.begin(), px.end()}}});
  std::size_t edge_pixels = 0;
  for (auto t : run.outputs.at("mask")) edge_pixels += t != 0;
  const auto est = dataflow::estimate_graph_cycles(g, cycle_model::paper_table_profile());
  std::printf("edge pixels: %zu, pipeline estimate: %llu cycles (fill %llu)\n", edge_pixels,
              static_cast<unsigned long long>(est.total_cycles), static_cast<unsigned long long>(est.latency));

  const auto cmp = cycle_model::compare(cycle_model::Kernel::conv, {.width = kWidth, .height = kHeight},
                                        cycle_model::paper_table_profile(), {129.0, 128.0});
  std::printf("software/restructured cycles: %.1fx\n", cmp.cycle_ratio);
  return 0;
}
