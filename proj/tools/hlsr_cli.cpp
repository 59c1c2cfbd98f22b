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

// hlsr: command-line front end.
//
//   hlsr huffman  --freqs F.csv --mode reference|restructured [--lengths L.csv] [--report R.json] [--arrays A.csv]
//   hlsr conv     --image I.pgm --mode reference|streaming [--kernel K] [--out O.pgm] [--raw R.csv] [--report R.json]
//   hlsr estimate --design conv|huffman --style S (--width W --height H | --n N) [--profile P] [--freq-mhz F]
//   hlsr compare  --design conv|huffman (--width W --height H | --n N) [--profile P] --freq-software F --freq-restructured F
//   hlsr codegen  --template T --params P.json --out DIR
//   hlsr dse      --space S.json --out R.csv [--profile P] [--report R.json]
//   hlsr graph    --spec G.json --in NAME=PATH... --out NAME=PATH... [--schedule round-robin|random --seed N] [--report R.json]
//
// Exit status is 0 on success, 1 on a processing error and 2 on bad usage.
// With --json, errors are also written to stderr as a JSON object.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hlsr.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void emit_json(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    hlsr::io::write_file(path, text);
  }
}

hlsr::cycle_model::CalibrationProfile resolve_profile(const std::string& name) {
  if (name.ends_with(".json")) {
    json j;
    try {
      j = json::parse(hlsr::io::read_file(name));
    } catch (const json::parse_error& e) {
      throw hlsr::Error(hlsr::ErrorKind::configuration, std::string("profile file: ") + e.what());
    }
    return hlsr::cycle_model::profile_from_json(j);
  }
  return hlsr::cycle_model::profile_by_name(name);
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(hlsr::io::read_file(path));
  } catch (const json::parse_error& e) {
    throw hlsr::Error(hlsr::ErrorKind::invalid_input, path + ": " + e.what());
  }
}

// ------------------------------------------------------------- huffman ----

struct HuffmanArgs {
  std::string freqs;
  std::string mode = "restructured";
  std::string lengths;
  std::string report;
  std::string arrays;
};

void run_huffman(const HuffmanArgs& a) {
  using namespace hlsr::huffman;
  const SortedFreqTable table = hlsr::io::parse_freq_csv(hlsr::io::read_file(a.freqs));
  json report;
  report["schema"] = 1;
  report["mode"] = a.mode;
  report["n"] = table.size();

  BitLengthTable lengths;
  if (a.mode == "reference") {
    if (!a.arrays.empty()) {
      throw hlsr::Error(hlsr::ErrorKind::invalid_input, "--arrays requires --mode restructured");
    }
    lengths = build_tree_reference(table);
    report["num_internal"] = table.size() - 1;
  } else {
    BuildTrace trace;
    const HuffmanTreeArrays arrays = build_tree_restructured(table, &trace);
    lengths = compute_bit_lengths(arrays, table);
    report["num_internal"] = arrays.num_internal;
    report["node_creations"] = trace.node_creations;
    if (!a.arrays.empty()) hlsr::io::write_file(a.arrays, hlsr::io::format_arrays_csv(arrays));
  }
  report["weighted_length"] = weighted_length(table, lengths);
  report["kraft_equality"] = kraft_equality(lengths);
  std::uint32_t max_len = 0;
  for (const auto& [sym, len] : lengths) max_len = std::max(max_len, len);
  report["max_length"] = max_len;

  if (!a.lengths.empty()) hlsr::io::write_file(a.lengths, hlsr::io::format_lengths_csv(lengths));
  if (!a.report.empty() || a.lengths.empty()) emit_json(report, a.report);
}

// ---------------------------------------------------------------- conv ----

struct ConvArgs {
  std::string image;
  std::string mode = "streaming";
  std::string kernel = "sobel-standard";
  std::string out;
  std::string raw;
  std::string report;
};

void run_conv(const ConvArgs& a) {
  using namespace hlsr::stencil;
  const Image image = hlsr::io::read_pgm(a.image);
  const auto kernel = hlsr::io::resolve_kernel(a.kernel);
  json report;
  report["schema"] = 1;
  report["mode"] = a.mode;
  report["kernel"] = a.kernel;
  report["width"] = image.width;
  report["height"] = image.height;

  auto run = [&](ResponseMode m) {
    if (a.mode == "reference") return convolve_reference(image, kernel.gx, kernel.gy, m);
    const StreamingResult r = convolve_streaming(image, kernel.gx, kernel.gy, m);
    report["pushes"] = r.pushes;
    report["emitted"] = r.emitted;
    report["latency"] = image.width + 1;
    report["stall_free"] = r.stall_free;
    return r.image;
  };
  if (!a.raw.empty()) hlsr::io::write_file(a.raw, hlsr::io::format_response_csv(run(ResponseMode::raw)));
  if (!a.out.empty() || a.raw.empty()) {
    const ResponseImage display = run(ResponseMode::display);
    if (!a.out.empty()) hlsr::io::write_pgm(a.out, hlsr::io::to_display_image(display));
  }
  if (!a.report.empty() || (a.out.empty() && a.raw.empty())) emit_json(report, a.report);
}

// ----------------------------------------------------- estimate/compare ----

struct EstimateArgs {
  std::string design;
  std::string style = "restructured";
  std::uint64_t width = 0;
  std::uint64_t height = 0;
  std::uint64_t n = 0;
  std::uint64_t k = 3;
  std::string profile = "paper-table";
  double freq_mhz = 100.0;
  double freq_software = 0;
  double freq_restructured = 0;
  std::string report;
};

hlsr::cycle_model::LoopSchedule schedule_for(const EstimateArgs& a, hlsr::cycle_model::Style style) {
  using namespace hlsr::cycle_model;
  return parse_kernel(a.design) == Kernel::huffman ? LoopSchedule::huffman(style, a.n)
                                                   : LoopSchedule::conv(style, a.width, a.height, a.k);
}

void run_estimate(const EstimateArgs& a) {
  using namespace hlsr::cycle_model;
  const auto profile = resolve_profile(a.profile);
  const auto schedule = schedule_for(a, parse_style(a.style));
  emit_json(estimate_report(schedule, estimate_cycles(schedule, profile), profile.name, a.freq_mhz), a.report);
}

void run_compare(const EstimateArgs& a) {
  using namespace hlsr::cycle_model;
  const auto profile = resolve_profile(a.profile);
  const double fs = a.freq_software > 0 ? a.freq_software : a.freq_mhz;
  const double fr = a.freq_restructured > 0 ? a.freq_restructured : a.freq_mhz;
  const auto report = compare_schedules(schedule_for(a, Style::software), schedule_for(a, Style::restructured),
                                        profile, fs, fr);
  emit_json(comparison_report(report), a.report);
}

// ------------------------------------------------------------- codegen ----

struct CodegenArgs {
  std::string template_name;
  std::string params;
  std::string out;
};

void run_codegen(const CodegenArgs& a) {
  using namespace hlsr::codegen;
  const json params = read_json_file(a.params);
  std::string name = a.template_name;
  if (name.empty()) {
    if (!params.contains("template")) {
      throw hlsr::Error(hlsr::ErrorKind::validation, "no --template given and params have no 'template'");
    }
    name = params.at("template").get<std::string>();
  }
  const TemplateId id = parse_template_id(name);
  const GeneratedSource source = instantiate(id, params_from_json(id, params));
  write_generated(source, a.out);
}

// ----------------------------------------------------------------- dse ----

struct DseArgs {
  std::string space;
  std::string out;
  std::string profile = "paper-table";
  std::string report;
};

void run_dse(const DseArgs& a) {
  using namespace hlsr::dse;
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(hlsr::io::read_file(a.space));
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw hlsr::Error(hlsr::ErrorKind::invalid_input, a.space + ": " + e.what());
  }
  const SearchSpace space = space_from_json(j);
  const auto profile = resolve_profile(a.profile);
  const auto points = explore(space, profile);
  hlsr::io::write_file(a.out, format_results_csv(space, points));
  if (!a.report.empty()) {
    json report;
    report["schema"] = 1;
    report["template"] = std::string(hlsr::codegen::to_string(space.id));
    report["profile"] = profile.name;
    report["points"] = points.size();
    report["frontier"] = pareto_indices(points);
    emit_json(report, a.report);
  }
}

// --------------------------------------------------------------- graph ----

struct GraphArgs {
  std::string spec;
  std::vector<std::string> in;
  std::vector<std::string> out;
  std::string schedule = "round-robin";
  std::uint64_t seed = 0;
  std::string report;
};

std::pair<std::string, std::string> split_binding(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw hlsr::Error(hlsr::ErrorKind::invalid_input, "binding '" + s + "' must be NAME=PATH");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

void run_graph(const GraphArgs& a) {
  using namespace hlsr::dataflow;
  const StreamGraph graph = graph_from_json(read_json_file(a.spec));

  std::map<std::string, std::vector<Token>> inputs;
  std::optional<std::pair<std::size_t, std::size_t>> dims;
  for (const auto& binding : a.in) {
    const auto [name, path] = split_binding(binding);
    std::vector<Token> tokens;
    if (path.ends_with(".pgm")) {
      const auto image = hlsr::io::read_pgm(path);
      if (!dims) dims = {image.width, image.height};
      tokens.assign(image.pixels.begin(), image.pixels.end());
    } else {
      const auto csv = hlsr::io::parse_csv(hlsr::io::read_file(path));
      if (csv.header != std::vector<std::string>{"value"}) {
        throw hlsr::Error(hlsr::ErrorKind::invalid_input, path + ": token CSV header must be 'value'");
      }
      for (const auto& row : csv.rows) tokens.push_back(hlsr::io::parse_number<Token>(row[0], "token"));
    }
    inputs[name] = std::move(tokens);
  }

  RunOptions options;
  if (a.schedule == "random") {
    options.policy = SchedulePolicy::randomized;
    options.seed = a.seed;
  } else if (a.schedule != "round-robin") {
    throw hlsr::Error(hlsr::ErrorKind::invalid_input, "--schedule must be round-robin or random");
  }
  const RunResult result = run_functional(graph, inputs, options);

  for (const auto& binding : a.out) {
    const auto [name, path] = split_binding(binding);
    const auto it = result.outputs.find(name);
    if (it == result.outputs.end()) {
      throw hlsr::Error(hlsr::ErrorKind::invalid_input, "graph has no output '" + name + "'");
    }
    const auto& tokens = it->second;
    if (path.ends_with(".pgm")) {
      if (!dims || dims->first * dims->second != tokens.size()) {
        throw hlsr::Error(hlsr::ErrorKind::invalid_input,
                          "output '" + name + "' cannot be written as PGM: no matching image dimensions");
      }
      std::vector<std::uint8_t> px(tokens.size());
      for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = static_cast<std::uint8_t>(std::clamp<Token>(tokens[i], 0, 255));
      }
      hlsr::io::write_pgm(path, hlsr::stencil::Image(dims->first, dims->second, std::move(px)));
    } else {
      std::string text = "value\n";
      for (const Token t : tokens) text += std::to_string(t) + "\n";
      hlsr::io::write_file(path, text);
    }
  }

  if (!a.report.empty()) {
    json report;
    report["schema"] = 1;
    report["firings"] = result.firings;
    report["outputs"] = json::object();
    for (const auto& [name, tokens] : result.outputs) report["outputs"][name] = tokens.size();
    report["channels"] = json::array();
    for (const auto& c : result.channels) {
      report["channels"].push_back({{"name", c.name}, {"depth", c.depth}, {"max_occupancy", c.max_occupancy}});
    }
    std::map<std::string, std::uint64_t> counts;
    for (const auto& [name, tokens] : inputs) counts[name] = tokens.size();
    const auto estimate =
        estimate_graph_cycles(graph, hlsr::cycle_model::paper_table_profile(), counts);
    report["estimate"] = {{"cycles", estimate.total_cycles}, {"latency", estimate.latency}};
    emit_json(report, a.report);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hlsr: restructured HLS kernels, cycle models, templates and exploration"};
  app.require_subcommand(1);
  bool json_errors = false;
  app.add_flag("--json", json_errors, "Also report errors as JSON on stderr");

  HuffmanArgs huff;
  auto* huffman = app.add_subcommand("huffman", "Build a Huffman tree and report bit lengths");
  huffman->add_option("--freqs", huff.freqs, "Frequency CSV (symbol,freq), sorted by freq")->required();
  huffman->add_option("--mode", huff.mode)->check(CLI::IsMember({"reference", "restructured"}));
  huffman->add_option("--lengths", huff.lengths, "Output bit lengths CSV");
  huffman->add_option("--report", huff.report, "Output JSON report");
  huffman->add_option("--arrays", huff.arrays, "Output node arrays CSV (restructured mode)");

  ConvArgs conv;
  auto* convolve = app.add_subcommand("conv", "Run the 3x3 convolution on a PGM image");
  convolve->add_option("--image", conv.image, "Input P5 PGM")->required();
  convolve->add_option("--mode", conv.mode)->check(CLI::IsMember({"reference", "streaming"}));
  convolve->add_option("--kernel", conv.kernel, "sobel-standard, sobel-paper or a coefficient JSON file");
  convolve->add_option("--out", conv.out, "Output display PGM");
  convolve->add_option("--raw", conv.raw, "Output raw responses CSV (row,col,value)");
  convolve->add_option("--report", conv.report, "Output JSON report");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate clock cycles for one schedule");
  EstimateArgs cmp;
  auto* compare = app.add_subcommand("compare", "Compare software and restructured schedules");
  for (auto [cmd, args] : {std::pair{estimate, &est}, std::pair{compare, &cmp}}) {
    cmd->add_option("--design", args->design)->required()->check(CLI::IsMember({"conv", "huffman"}));
    cmd->add_option("--width", args->width);
    cmd->add_option("--height", args->height);
    cmd->add_option("--n", args->n, "Number of symbols");
    cmd->add_option("--k", args->k, "Convolution kernel size");
    cmd->add_option("--profile", args->profile, "Profile name or JSON file");
    cmd->add_option("--freq-mhz", args->freq_mhz, "Clock frequency in MHz");
    cmd->add_option("--report", args->report, "Output JSON report (default stdout)");
  }
  estimate->add_option("--style", est.style)->check(CLI::IsMember({"software", "restructured"}));
  compare->add_option("--freq-software", cmp.freq_software, "Software design frequency in MHz");
  compare->add_option("--freq-restructured", cmp.freq_restructured, "Restructured design frequency in MHz");

  CodegenArgs gen;
  auto* codegen = app.add_subcommand("codegen", "Instantiate an HLS template");
  codegen->add_option("--template", gen.template_name, "conv2d_stream or huffman_tree");
  codegen->add_option("--params", gen.params, "Parameter JSON")->required();
  codegen->add_option("--out", gen.out, "Output directory")->required();

  DseArgs dse_args;
  auto* dse = app.add_subcommand("dse", "Explore a template parameter space");
  dse->add_option("--space", dse_args.space, "Search space JSON")->required();
  dse->add_option("--out", dse_args.out, "Results CSV")->required();
  dse->add_option("--profile", dse_args.profile);
  dse->add_option("--report", dse_args.report, "Output JSON summary");

  GraphArgs graph_args;
  auto* graph = app.add_subcommand("graph", "Simulate a streaming dataflow graph");
  graph->add_option("--spec", graph_args.spec, "Graph JSON")->required();
  graph->add_option("--in", graph_args.in, "NAME=PATH input binding (.pgm or value CSV)");
  graph->add_option("--out", graph_args.out, "NAME=PATH output binding (.pgm or value CSV)");
  graph->add_option("--schedule", graph_args.schedule);
  graph->add_option("--seed", graph_args.seed);
  graph->add_option("--report", graph_args.report, "Output JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*huffman) run_huffman(huff);
    if (*convolve) run_conv(conv);
    if (*estimate) run_estimate(est);
    if (*compare) run_compare(cmp);
    if (*codegen) run_codegen(gen);
    if (*dse) run_dse(dse_args);
    if (*graph) run_graph(graph_args);
  } catch (const hlsr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (json_errors) {
      json j{{"schema", 1}, {"error", {{"kind", std::string(hlsr::to_string(e.kind()))}, {"message", e.what()}}}};
      std::cerr << j.dump() << "\n";
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (json_errors) {
      json j{{"schema", 1}, {"error", {{"kind", "internal"}, {"message", e.what()}}}};
      std::cerr << j.dump() << "\n";
    }
    return 1;
  }
  return 0;
}
