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
 * @file dataflow.hpp
 * @brief Streaming composition of kernel instances over bounded FIFOs.
 *
 * Graphs are feed-forward Kahn process networks: every instance blocks on
 * reads and writes, and each firing consumes and produces a fixed number of
 * tokens. The observable output therefore does not depend on the order in
 * which the simulator picks runnable instances.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hlsr/cycle_model.hpp"
#include "hlsr/error.hpp"
#include "hlsr/io.hpp"
#include "hlsr/stencil.hpp"

namespace hlsr::dataflow {

using Token = std::int64_t;

enum class KernelKind { conv2d_stream, threshold, passthrough, custom_pointwise, split, join };

inline std::string_view to_string(KernelKind k) {
  switch (k) {
    case KernelKind::conv2d_stream: return "conv2d_stream";
    case KernelKind::threshold: return "threshold";
    case KernelKind::passthrough: return "passthrough";
    case KernelKind::custom_pointwise: return "custom_pointwise";
    case KernelKind::split: return "split";
    case KernelKind::join: return "join";
  }
  return "unknown";
}

inline KernelKind parse_kernel_kind(std::string_view s) {
  if (s == "conv2d_stream") return KernelKind::conv2d_stream;
  if (s == "threshold") return KernelKind::threshold;
  if (s == "passthrough") return KernelKind::passthrough;
  if (s == "custom_pointwise" || s == "custom-pointwise") return KernelKind::custom_pointwise;
  if (s == "split") return KernelKind::split;
  if (s == "join") return KernelKind::join;
  throw Error(ErrorKind::validation, "unknown kernel kind '" + std::string(s) + "'");
}

struct ConvKernelParams {
  std::size_t width = 0;
  std::size_t height = 0;
  stencil::Coeffs3x3 gx = stencil::SOBEL_GX_STANDARD;
  stencil::Coeffs3x3 gy = stencil::SOBEL_GY_STANDARD;
  stencil::ResponseMode mode = stencil::ResponseMode::raw;
};

struct ThresholdParams {
  Token threshold = 0;
  Token high = 255;
  Token low = 0;
};

// value * scale + offset, unless fn is set
struct PointwiseParams {
  Token scale = 1;
  Token offset = 0;
  std::function<Token(Token)> fn;
};

struct SplitParams {
  std::size_t fanout = 2;  // broadcasts every token to each branch
};

struct JoinParams {
  std::size_t fanin = 2;  // one token from each branch, summed
};

struct KernelInstance {
  std::string id;
  KernelKind kind = KernelKind::passthrough;
  ConvKernelParams conv;
  ThresholdParams threshold;
  PointwiseParams pointwise;
  SplitParams split;
  JoinParams join;
};

inline std::vector<std::string> input_ports(const KernelInstance& k) {
  if (k.kind != KernelKind::join) return {"in"};
  std::vector<std::string> ports;
  for (std::size_t i = 0; i < k.join.fanin; ++i) ports.push_back("in" + std::to_string(i));
  return ports;
}

inline std::vector<std::string> output_ports(const KernelInstance& k) {
  if (k.kind != KernelKind::split) return {"out"};
  std::vector<std::string> ports;
  for (std::size_t i = 0; i < k.split.fanout; ++i) ports.push_back("out" + std::to_string(i));
  return ports;
}

/// An instance port, or an external graph input/output.
struct Endpoint {
  enum class Type { port, graph_input, graph_output };
  Type type = Type::port;
  std::string name;  // instance id or external binding name
  std::string port;

  static Endpoint at(std::string instance, std::string port) {
    return {Type::port, std::move(instance), std::move(port)};
  }
  static Endpoint input(std::string name) { return {Type::graph_input, std::move(name), {}}; }
  static Endpoint output(std::string name) { return {Type::graph_output, std::move(name), {}}; }

  std::string str() const {
    switch (type) {
      case Type::graph_input: return "input:" + name;
      case Type::graph_output: return "output:" + name;
      case Type::port: break;
    }
    return name + "." + port;
  }

  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

inline Endpoint parse_endpoint(std::string_view s) {
  if (s.starts_with("input:")) return Endpoint::input(std::string(s.substr(6)));
  if (s.starts_with("output:")) return Endpoint::output(std::string(s.substr(7)));
  const auto dot = s.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == s.size()) {
    throw Error(ErrorKind::validation,
                "endpoint '" + std::string(s) + "' must be instance.port, input:NAME or output:NAME");
  }
  return Endpoint::at(std::string(s.substr(0, dot)), std::string(s.substr(dot + 1)));
}

struct FifoChannel {
  Endpoint source;
  Endpoint sink;
  std::size_t depth = 1;
};

struct PipelinePattern {
  std::vector<std::string> stages;
};

/// head stages -> split -> branches (each a stage list, possibly empty)
/// -> join -> tail stages.
struct SplitJoinPattern {
  std::vector<std::string> head;
  std::string split;
  std::vector<std::vector<std::string>> branches;
  std::string join;
  std::vector<std::string> tail;
};

using PatternDescription = std::variant<PipelinePattern, SplitJoinPattern>;

struct StreamGraph {
  std::vector<KernelInstance> instances;
  std::vector<FifoChannel> channels;
  PatternDescription pattern;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  const KernelInstance* find(std::string_view id) const {
    for (const auto& k : instances) {
      if (k.id == id) return &k;
    }
    return nullptr;
  }
};

// ---------------------------------------------------------- validation ----

enum class IssueKind {
  bad_parameter,
  duplicate_id,
  unknown_endpoint,
  bad_depth,
  duplicate_connection,
  dangling_port,
  cycle,
  unreachable_instance,
  pattern_mismatch,
};

inline std::string_view to_string(IssueKind k) {
  switch (k) {
    case IssueKind::bad_parameter: return "bad_parameter";
    case IssueKind::duplicate_id: return "duplicate_id";
    case IssueKind::unknown_endpoint: return "unknown_endpoint";
    case IssueKind::bad_depth: return "bad_depth";
    case IssueKind::duplicate_connection: return "duplicate_connection";
    case IssueKind::dangling_port: return "dangling_port";
    case IssueKind::cycle: return "cycle";
    case IssueKind::unreachable_instance: return "unreachable_instance";
    case IssueKind::pattern_mismatch: return "pattern_mismatch";
  }
  return "unknown";
}

struct GraphIssue {
  IssueKind kind;
  std::string message;
};

namespace detail {

using Edge = std::pair<Endpoint, Endpoint>;

// Channels a pattern requires, ignoring depth.
inline std::set<Edge> pattern_edges(const StreamGraph& g, std::vector<std::string>& members,
                                    std::vector<GraphIssue>& issues) {
  std::set<Edge> edges;
  auto single_io = [&](const std::string& id) {
    const auto* k = g.find(id);
    if (k && (k->kind == KernelKind::split || k->kind == KernelKind::join)) {
      issues.push_back({IssueKind::pattern_mismatch,
                        "stage '" + id + "' must have a single input and output"});
    }
  };
  // Chains stages starting from `from`; returns the last endpoint.
  auto chain = [&](Endpoint from, const std::vector<std::string>& stages) {
    for (const auto& id : stages) {
      single_io(id);
      members.push_back(id);
      edges.insert({from, Endpoint::at(id, "in")});
      from = Endpoint::at(id, "out");
    }
    return from;
  };
  auto sole = [&](const std::vector<std::string>& names, const char* what) -> std::string {
    if (names.size() != 1) {
      issues.push_back({IssueKind::pattern_mismatch,
                        std::string("pattern needs exactly one graph ") + what});
      return names.empty() ? std::string() : names.front();
    }
    return names.front();
  };
  const std::string in = sole(g.inputs, "input");
  const std::string out = sole(g.outputs, "output");

  if (const auto* p = std::get_if<PipelinePattern>(&g.pattern)) {
    if (p->stages.empty()) {
      issues.push_back({IssueKind::pattern_mismatch, "pipeline has no stages"});
    }
    edges.insert({chain(Endpoint::input(in), p->stages), Endpoint::output(out)});
    return edges;
  }

  const auto& sj = std::get<SplitJoinPattern>(g.pattern);
  const Endpoint split_in = chain(Endpoint::input(in), sj.head);
  const auto* split = g.find(sj.split);
  const auto* join = g.find(sj.join);
  if (!split || split->kind != KernelKind::split) {
    issues.push_back({IssueKind::pattern_mismatch, "split-join needs a split instance '" + sj.split + "'"});
  }
  if (!join || join->kind != KernelKind::join) {
    issues.push_back({IssueKind::pattern_mismatch, "split-join needs a join instance '" + sj.join + "'"});
  }
  if (split && split->split.fanout != sj.branches.size()) {
    issues.push_back({IssueKind::pattern_mismatch, "split fan-out does not match branch count"});
  }
  if (join && join->join.fanin != sj.branches.size()) {
    issues.push_back({IssueKind::pattern_mismatch, "join fan-in does not match branch count"});
  }
  members.push_back(sj.split);
  members.push_back(sj.join);
  edges.insert({split_in, Endpoint::at(sj.split, "in")});
  for (std::size_t b = 0; b < sj.branches.size(); ++b) {
    const Endpoint last =
        chain(Endpoint::at(sj.split, "out" + std::to_string(b)), sj.branches[b]);
    edges.insert({last, Endpoint::at(sj.join, "in" + std::to_string(b))});
  }
  edges.insert({chain(Endpoint::at(sj.join, "out"), sj.tail), Endpoint::output(out)});
  return edges;
}

}  // namespace detail

inline std::vector<GraphIssue> validate_graph(const StreamGraph& g) {
  std::vector<GraphIssue> issues;
  auto add = [&](IssueKind k, std::string m) { issues.push_back({k, std::move(m)}); };

  std::map<std::string, const KernelInstance*> by_id;
  for (const auto& k : g.instances) {
    if (!by_id.emplace(k.id, &k).second) add(IssueKind::duplicate_id, "duplicate instance id '" + k.id + "'");
    switch (k.kind) {
      case KernelKind::conv2d_stream:
        if (k.conv.width < 3 || k.conv.height < 3) {
          add(IssueKind::bad_parameter, "conv instance '" + k.id + "' needs width, height >= 3");
        }
        break;
      case KernelKind::split:
        if (k.split.fanout < 2) add(IssueKind::bad_parameter, "split '" + k.id + "' needs fanout >= 2");
        break;
      case KernelKind::join:
        if (k.join.fanin < 2) add(IssueKind::bad_parameter, "join '" + k.id + "' needs fanin >= 2");
        break;
      default:
        break;
    }
  }
  const std::set<std::string> inputs(g.inputs.begin(), g.inputs.end());
  const std::set<std::string> outputs(g.outputs.begin(), g.outputs.end());

  auto endpoint_known = [&](const Endpoint& e, bool as_source) {
    switch (e.type) {
      case Endpoint::Type::graph_input: return as_source && inputs.contains(e.name);
      case Endpoint::Type::graph_output: return !as_source && outputs.contains(e.name);
      case Endpoint::Type::port: break;
    }
    const auto it = by_id.find(e.name);
    if (it == by_id.end()) return false;
    const auto ports = as_source ? output_ports(*it->second) : input_ports(*it->second);
    return std::find(ports.begin(), ports.end(), e.port) != ports.end();
  };

  std::map<Endpoint, std::size_t> uses;
  for (const auto& c : g.channels) {
    if (!endpoint_known(c.source, true)) {
      add(IssueKind::unknown_endpoint, "channel source '" + c.source.str() + "' does not exist");
    }
    if (!endpoint_known(c.sink, false)) {
      add(IssueKind::unknown_endpoint, "channel sink '" + c.sink.str() + "' does not exist");
    }
    if (c.depth < 1) {
      add(IssueKind::bad_depth, "channel " + c.source.str() + " -> " + c.sink.str() + " needs depth >= 1");
    }
    for (const auto& e : {c.source, c.sink}) {
      if (++uses[e] == 2) add(IssueKind::duplicate_connection, "'" + e.str() + "' is connected more than once");
    }
  }
  for (const auto& k : g.instances) {
    for (const auto& p : input_ports(k)) {
      if (!uses.contains(Endpoint::at(k.id, p))) add(IssueKind::dangling_port, "input port '" + k.id + "." + p + "' is not connected");
    }
    for (const auto& p : output_ports(k)) {
      if (!uses.contains(Endpoint::at(k.id, p))) add(IssueKind::dangling_port, "output port '" + k.id + "." + p + "' is not connected");
    }
  }
  for (const auto& n : g.inputs) {
    if (!uses.contains(Endpoint::input(n))) add(IssueKind::dangling_port, "graph input '" + n + "' is not connected");
  }
  for (const auto& n : g.outputs) {
    if (!uses.contains(Endpoint::output(n))) add(IssueKind::dangling_port, "graph output '" + n + "' is not connected");
  }

  // instance-level successor lists
  std::map<std::string, std::vector<std::string>> succ;
  std::vector<std::string> roots;
  for (const auto& c : g.channels) {
    if (c.sink.type != Endpoint::Type::port) continue;
    if (c.source.type == Endpoint::Type::graph_input) {
      roots.push_back(c.sink.name);
    } else if (c.source.type == Endpoint::Type::port) {
      succ[c.source.name].push_back(c.sink.name);
    }
  }

  enum class Mark { none, active, done };
  std::map<std::string, Mark> mark;
  bool cyclic = false;
  std::function<void(const std::string&)> dfs = [&](const std::string& id) {
    mark[id] = Mark::active;
    for (const auto& next : succ[id]) {
      if (mark[next] == Mark::active) {
        if (!cyclic) add(IssueKind::cycle, "cycle detected through '" + next + "' (feedback is unsupported)");
        cyclic = true;
      } else if (mark[next] == Mark::none) {
        dfs(next);
      }
    }
    mark[id] = Mark::done;
  };
  for (const auto& k : g.instances) {
    if (mark[k.id] == Mark::none) dfs(k.id);
  }

  std::set<std::string> reached;
  std::vector<std::string> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    const std::string id = stack.back();
    stack.pop_back();
    if (!reached.insert(id).second) continue;
    for (const auto& next : succ[id]) stack.push_back(next);
  }
  for (const auto& k : g.instances) {
    if (!reached.contains(k.id)) add(IssueKind::unreachable_instance, "instance '" + k.id + "' is not reachable from a graph input");
  }

  std::vector<std::string> members;
  const auto expected = detail::pattern_edges(g, members, issues);
  std::set<detail::Edge> actual;
  for (const auto& c : g.channels) actual.insert({c.source, c.sink});
  for (const auto& e : expected) {
    if (!actual.contains(e)) add(IssueKind::pattern_mismatch, "pattern expects channel " + e.first.str() + " -> " + e.second.str());
  }
  for (const auto& e : actual) {
    if (!expected.contains(e)) add(IssueKind::pattern_mismatch, "channel " + e.first.str() + " -> " + e.second.str() + " is not part of the pattern");
  }
  const std::set<std::string> bound(members.begin(), members.end());
  if (bound.size() != members.size()) add(IssueKind::pattern_mismatch, "an instance is bound more than once in the pattern");
  for (const auto& k : g.instances) {
    if (!bound.contains(k.id)) add(IssueKind::pattern_mismatch, "instance '" + k.id + "' is not bound by the pattern");
  }
  for (const auto& id : bound) {
    if (!by_id.contains(id)) add(IssueKind::pattern_mismatch, "pattern names unknown instance '" + id + "'");
  }
  return issues;
}

inline void require_valid(const StreamGraph& g) {
  const auto issues = validate_graph(g);
  if (issues.empty()) return;
  std::string message = "invalid stream graph:";
  for (const auto& i : issues) message += " [" + std::string(to_string(i.kind)) + "] " + i.message + ";";
  throw Error(ErrorKind::validation, message);
}

// ---------------------------------------------------------- simulation ----

/// FIFO that refuses to exceed its declared depth.
class BoundedFifo {
 public:
  BoundedFifo(std::string name, std::size_t depth) : name_(std::move(name)), depth_(depth) {}

  const std::string& name() const noexcept { return name_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return q_.size(); }
  std::size_t max_occupancy() const noexcept { return max_occupancy_; }
  bool empty() const noexcept { return q_.empty(); }
  bool full() const noexcept { return q_.size() >= depth_; }
  bool closed() const noexcept { return closed_; }
  bool exhausted() const noexcept { return closed_ && q_.empty(); }

  void push(Token t) {
    if (full()) throw Error(ErrorKind::protocol, "FIFO '" + name_ + "' overflow");
    q_.push_back(t);
    max_occupancy_ = std::max(max_occupancy_, q_.size());
  }
  Token pop() {
    if (q_.empty()) throw Error(ErrorKind::protocol, "FIFO '" + name_ + "' underflow");
    const Token t = q_.front();
    q_.pop_front();
    return t;
  }
  void close() noexcept { closed_ = true; }

 private:
  std::string name_;
  std::size_t depth_;
  std::deque<Token> q_;
  std::size_t max_occupancy_ = 0;
  bool closed_ = false;
};

namespace detail {

class Process {
 public:
  virtual ~Process() = default;
  // Fires once if possible; returns true on progress (including finishing).
  virtual bool step() = 0;
  virtual bool done() const = 0;
  virtual std::string name() const = 0;
  // Channels this process is currently blocked on.
  virtual std::vector<const BoundedFifo*> blocked_on() const = 0;
};

class SourceProcess final : public Process {
 public:
  SourceProcess(std::string name, const std::vector<Token>& tokens, BoundedFifo& out)
      : name_(std::move(name)), tokens_(tokens), out_(out) {}
  bool step() override {
    if (done_) return false;
    if (next_ == tokens_.size()) {
      out_.close();
      done_ = true;
      return true;
    }
    if (out_.full()) return false;
    out_.push(tokens_[next_++]);
    return true;
  }
  bool done() const override { return done_; }
  std::string name() const override { return "input:" + name_; }
  std::vector<const BoundedFifo*> blocked_on() const override { return {&out_}; }

 private:
  std::string name_;
  const std::vector<Token>& tokens_;
  BoundedFifo& out_;
  std::size_t next_ = 0;
  bool done_ = false;
};

class SinkProcess final : public Process {
 public:
  SinkProcess(std::string name, BoundedFifo& in, std::vector<Token>& out)
      : name_(std::move(name)), in_(in), out_(out) {}
  bool step() override {
    if (done_) return false;
    if (in_.exhausted()) {
      done_ = true;
      return true;
    }
    if (in_.empty()) return false;
    out_.push_back(in_.pop());
    return true;
  }
  bool done() const override { return done_; }
  std::string name() const override { return "output:" + name_; }
  std::vector<const BoundedFifo*> blocked_on() const override { return {&in_}; }

 private:
  std::string name_;
  BoundedFifo& in_;
  std::vector<Token>& out_;
  bool done_ = false;
};

// One token in, one token out.
class PointwiseProcess final : public Process {
 public:
  PointwiseProcess(std::string name, std::function<Token(Token)> fn, BoundedFifo& in, BoundedFifo& out)
      : name_(std::move(name)), fn_(std::move(fn)), in_(in), out_(out) {}
  bool step() override {
    if (done_) return false;
    if (in_.exhausted()) {
      out_.close();
      done_ = true;
      return true;
    }
    if (in_.empty() || out_.full()) return false;
    out_.push(fn_(in_.pop()));
    return true;
  }
  bool done() const override { return done_; }
  std::string name() const override { return name_; }
  std::vector<const BoundedFifo*> blocked_on() const override {
    if (in_.empty()) return {&in_};
    return {&out_};
  }

 private:
  std::string name_;
  std::function<Token(Token)> fn_;
  BoundedFifo& in_;
  BoundedFifo& out_;
  bool done_ = false;
};

// Consumes exactly width*height pixels and produces the same number of
// responses in raster order.
class ConvProcess final : public Process {
 public:
  ConvProcess(std::string name, const ConvKernelParams& p, BoundedFifo& in, BoundedFifo& out)
      : name_(std::move(name)),
        state_(p.width, p.height, p.gx, p.gy, p.mode),
        in_(in),
        out_(out),
        total_(p.width * p.height) {}
  bool step() override {
    if (done_) return false;
    if (!state_.complete()) {
      const bool emits = state_.pushes() + 1 > state_.latency();
      if (in_.empty() || (emits && out_.full())) return false;
      const Token px = in_.pop();
      if (px < 0 || px > 255) {
        throw Error(ErrorKind::invalid_input, "conv instance '" + name_ + "' received non 8-bit pixel");
      }
      if (const auto o = state_.push(static_cast<std::uint8_t>(px))) {
        out_.push(o->value);
        ++emitted_;
      }
      return true;
    }
    if (emitted_ < total_) {
      if (out_.full()) return false;
      out_.push(0);
      ++emitted_;
      return true;
    }
    out_.close();
    done_ = true;
    return true;
  }
  bool done() const override { return done_; }
  std::string name() const override { return name_; }
  std::vector<const BoundedFifo*> blocked_on() const override {
    if (!state_.complete() && in_.empty()) return {&in_};
    return {&out_};
  }

 private:
  std::string name_;
  stencil::StreamingConvState state_;
  BoundedFifo& in_;
  BoundedFifo& out_;
  std::size_t total_;
  std::size_t emitted_ = 0;
  bool done_ = false;
};

class SplitProcess final : public Process {
 public:
  SplitProcess(std::string name, BoundedFifo& in, std::vector<BoundedFifo*> outs)
      : name_(std::move(name)), in_(in), outs_(std::move(outs)) {}
  bool step() override {
    if (done_) return false;
    if (in_.exhausted()) {
      for (auto* o : outs_) o->close();
      done_ = true;
      return true;
    }
    if (in_.empty()) return false;
    for (auto* o : outs_) {
      if (o->full()) return false;
    }
    const Token t = in_.pop();
    for (auto* o : outs_) o->push(t);
    return true;
  }
  bool done() const override { return done_; }
  std::string name() const override { return name_; }
  std::vector<const BoundedFifo*> blocked_on() const override {
    if (in_.empty()) return {&in_};
    std::vector<const BoundedFifo*> full;
    for (auto* o : outs_) {
      if (o->full()) full.push_back(o);
    }
    return full;
  }

 private:
  std::string name_;
  BoundedFifo& in_;
  std::vector<BoundedFifo*> outs_;
  bool done_ = false;
};

class JoinProcess final : public Process {
 public:
  JoinProcess(std::string name, std::vector<BoundedFifo*> ins, BoundedFifo& out)
      : name_(std::move(name)), ins_(std::move(ins)), out_(out) {}
  bool step() override {
    if (done_) return false;
    if (std::all_of(ins_.begin(), ins_.end(), [](auto* f) { return f->exhausted(); })) {
      out_.close();
      done_ = true;
      return true;
    }
    for (auto* f : ins_) {
      if (f->empty()) return false;
    }
    if (out_.full()) return false;
    Token sum = 0;
    for (auto* f : ins_) sum += f->pop();
    out_.push(sum);
    return true;
  }
  bool done() const override { return done_; }
  std::string name() const override { return name_; }
  std::vector<const BoundedFifo*> blocked_on() const override {
    std::vector<const BoundedFifo*> empty;
    for (auto* f : ins_) {
      if (f->empty()) empty.push_back(f);
    }
    if (!empty.empty()) return empty;
    return {&out_};
  }

 private:
  std::string name_;
  std::vector<BoundedFifo*> ins_;
  BoundedFifo& out_;
  bool done_ = false;
};

inline std::function<Token(Token)> pointwise_fn(const KernelInstance& k) {
  switch (k.kind) {
    case KernelKind::threshold: {
      const auto p = k.threshold;
      return [p](Token v) { return v >= p.threshold ? p.high : p.low; };
    }
    case KernelKind::custom_pointwise: {
      if (k.pointwise.fn) return k.pointwise.fn;
      const auto p = k.pointwise;
      return [scale = p.scale, offset = p.offset](Token v) { return v * scale + offset; };
    }
    default:
      return [](Token v) { return v; };
  }
}

}  // namespace detail

enum class SchedulePolicy { round_robin, randomized };

struct RunOptions {
  SchedulePolicy policy = SchedulePolicy::round_robin;
  std::uint64_t seed = 0;
};

struct ChannelStats {
  std::string name;
  std::size_t depth = 0;
  std::size_t max_occupancy = 0;
};

struct RunResult {
  std::map<std::string, std::vector<Token>> outputs;
  std::vector<ChannelStats> channels;
  std::size_t firings = 0;
};

/**
 * Runs the graph to completion. Each sweep visits every live process once
 * (in a shuffled order under the randomized policy, where a process may
 * also be skipped). A sweep with no progress and live processes left is a
 * deadlock; leftover tokens after all processes finish are reported the
 * same way.
 */
inline RunResult run_functional(const StreamGraph& g,
                                const std::map<std::string, std::vector<Token>>& inputs,
                                const RunOptions& options = {}) {
  require_valid(g);
  for (const auto& name : g.inputs) {
    if (!inputs.contains(name)) throw Error(ErrorKind::invalid_input, "no tokens bound to graph input '" + name + "'");
  }

  std::vector<std::unique_ptr<BoundedFifo>> fifos;
  std::map<Endpoint, BoundedFifo*> at;
  for (const auto& c : g.channels) {
    fifos.push_back(std::make_unique<BoundedFifo>(c.source.str() + "->" + c.sink.str(), c.depth));
    at[c.source] = fifos.back().get();
    at[c.sink] = fifos.back().get();
  }

  RunResult result;
  for (const auto& name : g.outputs) result.outputs[name];

  std::vector<std::unique_ptr<detail::Process>> procs;
  for (const auto& name : g.inputs) {
    procs.push_back(std::make_unique<detail::SourceProcess>(name, inputs.at(name), *at.at(Endpoint::input(name))));
  }
  for (const auto& k : g.instances) {
    auto& in = *at.at(Endpoint::at(k.id, input_ports(k).front()));
    auto& out = *at.at(Endpoint::at(k.id, output_ports(k).front()));
    switch (k.kind) {
      case KernelKind::conv2d_stream:
        procs.push_back(std::make_unique<detail::ConvProcess>(k.id, k.conv, in, out));
        break;
      case KernelKind::split: {
        std::vector<BoundedFifo*> outs;
        for (const auto& p : output_ports(k)) outs.push_back(at.at(Endpoint::at(k.id, p)));
        procs.push_back(std::make_unique<detail::SplitProcess>(k.id, in, std::move(outs)));
        break;
      }
      case KernelKind::join: {
        std::vector<BoundedFifo*> ins;
        for (const auto& p : input_ports(k)) ins.push_back(at.at(Endpoint::at(k.id, p)));
        procs.push_back(std::make_unique<detail::JoinProcess>(k.id, std::move(ins), out));
        break;
      }
      default:
        procs.push_back(std::make_unique<detail::PointwiseProcess>(k.id, detail::pointwise_fn(k), in, out));
        break;
    }
  }
  for (const auto& name : g.outputs) {
    procs.push_back(std::make_unique<detail::SinkProcess>(name, *at.at(Endpoint::output(name)), result.outputs[name]));
  }

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(procs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  while (true) {
    if (options.policy == SchedulePolicy::randomized) std::shuffle(order.begin(), order.end(), rng);
    bool progress = false;
    bool skipped = false;
    bool live = false;
    for (const std::size_t i : order) {
      auto& p = *procs[i];
      if (p.done()) continue;
      live = true;
      // under the randomized policy a process may sit out a sweep
      if (options.policy == SchedulePolicy::randomized && (rng() & 3u) == 0) {
        skipped = true;
        continue;
      }
      if (p.step()) {
        progress = true;
        ++result.firings;
      }
    }
    if (!live) break;
    if (!progress && !skipped) {
      std::string message = "deadlock: no runnable instance;";
      for (const auto& p : procs) {
        if (p->done()) continue;
        message += " " + p->name() + " blocked on";
        for (const auto* f : p->blocked_on()) {
          message += " '" + f->name() + "' (" + std::to_string(f->size()) + "/" + std::to_string(f->depth()) + ")";
        }
        message += ";";
      }
      throw Error(ErrorKind::deadlock, message);
    }
  }

  for (const auto& f : fifos) {
    if (!f->empty()) {
      throw Error(ErrorKind::deadlock, "deadlock: " + std::to_string(f->size()) +
                                           " undrained tokens on channel '" + f->name() + "'");
    }
    if (f->max_occupancy() > f->depth()) {
      throw Error(ErrorKind::protocol, "FIFO '" + f->name() + "' exceeded its depth");
    }
    result.channels.push_back({f->name(), f->depth(), f->max_occupancy()});
  }
  return result;
}

// ------------------------------------------------------- cycle estimate ----

/**
 * Steady-state cycles of the slowest instance plus the fill latencies along
 * the longest input-to-output path. Every instance runs at one token per
 * cycle; a conv stage costs its restructured cycle count and adds its
 * pipeline fill. `input_tokens` gives stream lengths for graph inputs that
 * do not feed a conv stage directly.
 */
inline cycle_model::CycleEstimate estimate_graph_cycles(
    const StreamGraph& g, const cycle_model::CalibrationProfile& profile,
    const std::map<std::string, std::uint64_t>& input_tokens = {}) {
  require_valid(g);
  std::map<Endpoint, const FifoChannel*> into;
  for (const auto& c : g.channels) into[c.sink] = &c;

  std::map<std::string, std::uint64_t> steady;
  std::map<std::string, std::uint64_t> latency;     // own fill latency
  std::map<std::string, std::uint64_t> out_tokens;  // tokens per output port
  std::map<std::string, std::uint64_t> arrival;     // longest latency path to instance output

  std::function<std::pair<std::uint64_t, std::uint64_t>(const Endpoint&)> source_of;
  std::function<void(const KernelInstance&)> visit;

  // (token count, accumulated latency) delivered into `sink`
  source_of = [&](const Endpoint& sink) -> std::pair<std::uint64_t, std::uint64_t> {
    const auto* c = into.at(sink);
    if (c->source.type == Endpoint::Type::graph_input) {
      if (const auto it = input_tokens.find(c->source.name); it != input_tokens.end()) return {it->second, 0};
      const auto* consumer = g.find(sink.name);
      if (consumer && consumer->kind == KernelKind::conv2d_stream) {
        return {consumer->conv.width * consumer->conv.height, 0};
      }
      throw Error(ErrorKind::invalid_input, "token count for graph input '" + c->source.name + "' is unknown");
    }
    const auto* k = g.find(c->source.name);
    visit(*k);
    return {out_tokens.at(k->id), arrival.at(k->id)};
  };

  visit = [&](const KernelInstance& k) {
    if (steady.contains(k.id)) return;
    std::uint64_t tokens = 0;
    std::uint64_t path = 0;
    for (const auto& p : input_ports(k)) {
      const auto [t, l] = source_of(Endpoint::at(k.id, p));
      tokens = std::max(tokens, t);
      path = std::max(path, l);
    }
    std::uint64_t own_steady = tokens;
    std::uint64_t own_latency = 0;
    if (k.kind == KernelKind::conv2d_stream) {
      const auto e = cycle_model::estimate_cycles(
          cycle_model::LoopSchedule::conv(cycle_model::Style::restructured, k.conv.width, k.conv.height),
          profile);
      own_steady = std::max(tokens, e.total_cycles);
      own_latency = e.latency;
      tokens = k.conv.width * k.conv.height;
    }
    steady[k.id] = own_steady;
    latency[k.id] = own_latency;
    out_tokens[k.id] = tokens;
    arrival[k.id] = path + own_latency;
  };

  std::uint64_t max_steady = 0;
  std::uint64_t max_path = 0;
  for (const auto& name : g.outputs) {
    const auto [tokens, path] = source_of(Endpoint::output(name));
    max_steady = std::max(max_steady, tokens);
    max_path = std::max(max_path, path);
  }
  for (const auto& [id, s] : steady) max_steady = std::max(max_steady, s);
  return {max_steady + max_path, max_path};
}

// ----------------------------------------------------------------- JSON ----

inline KernelInstance instance_from_json(const nlohmann::json& j) {
  KernelInstance k;
  k.id = j.at("id").get<std::string>();
  k.kind = parse_kernel_kind(j.at("kind").get<std::string>());
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  switch (k.kind) {
    case KernelKind::conv2d_stream: {
      k.conv.width = params.at("width").get<std::size_t>();
      k.conv.height = params.at("height").get<std::size_t>();
      const auto kernel = params.value("kernel", nlohmann::json("sobel-standard"));
      if (kernel.is_string()) {
        const auto pair = io::resolve_kernel(kernel.get<std::string>());
        k.conv.gx = pair.gx;
        k.conv.gy = pair.gy;
      } else {
        k.conv.gx = io::coeffs_from_json(kernel, "gx");
        k.conv.gy = io::coeffs_from_json(kernel, "gy");
      }
      const auto mode = params.value("mode", std::string("raw"));
      if (mode != "raw" && mode != "display") throw Error(ErrorKind::validation, "conv mode must be raw or display");
      k.conv.mode = mode == "raw" ? stencil::ResponseMode::raw : stencil::ResponseMode::display;
      break;
    }
    case KernelKind::threshold:
      k.threshold.threshold = params.at("threshold").get<Token>();
      k.threshold.high = params.value("high", Token{255});
      k.threshold.low = params.value("low", Token{0});
      break;
    case KernelKind::custom_pointwise:
      k.pointwise.scale = params.value("scale", Token{1});
      k.pointwise.offset = params.value("offset", Token{0});
      break;
    case KernelKind::split:
      k.split.fanout = params.value("fanout", std::size_t{2});
      break;
    case KernelKind::join:
      k.join.fanin = params.value("fanin", std::size_t{2});
      break;
    case KernelKind::passthrough:
      break;
  }
  return k;
}

inline StreamGraph graph_from_json(const nlohmann::json& j) {
  try {
    StreamGraph g;
    for (const auto& inst : j.at("instances")) g.instances.push_back(instance_from_json(inst));
    for (const auto& c : j.at("channels")) {
      g.channels.push_back({parse_endpoint(c.at("from").get<std::string>()),
                            parse_endpoint(c.at("to").get<std::string>()),
                            c.value("depth", std::size_t{2})});
    }
    g.inputs = j.at("inputs").get<std::vector<std::string>>();
    g.outputs = j.at("outputs").get<std::vector<std::string>>();
    const auto& p = j.at("pattern");
    const auto kind = p.at("kind").get<std::string>();
    if (kind == "pipeline") {
      g.pattern = PipelinePattern{p.at("stages").get<std::vector<std::string>>()};
    } else if (kind == "split-join") {
      SplitJoinPattern sj;
      sj.head = p.value("head", std::vector<std::string>{});
      sj.split = p.at("split").get<std::string>();
      sj.branches = p.at("branches").get<std::vector<std::vector<std::string>>>();
      sj.join = p.at("join").get<std::string>();
      sj.tail = p.value("tail", std::vector<std::string>{});
      g.pattern = std::move(sj);
    } else {
      throw Error(ErrorKind::validation, "unknown pattern kind '" + kind + "'");
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::validation, std::string("graph spec: ") + e.what());
  }
}

}  // namespace hlsr::dataflow
