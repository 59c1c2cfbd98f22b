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
 * @file huffman.hpp
 * @brief Huffman tree creation: a priority-queue software oracle and the
 * array-based single-pass construction used by the hardware architecture.
 *
 * The restructured builder never sorts and never allocates per node. Leaves
 * arrive sorted by frequency; internal nodes are appended to a queue whose
 * frequencies are nondecreasing, so the two minima are always at the heads
 * of the two queues.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hlsr/error.hpp"

namespace hlsr::huffman {

using Symbol = std::uint32_t;
using Frequency = std::uint64_t;

struct SymbolFreq {
  Symbol symbol = 0;
  Frequency freq = 0;

  friend bool operator==(const SymbolFreq&, const SymbolFreq&) = default;
};

/// Symbol/frequency list sorted by nondecreasing frequency, n >= 2.
class SortedFreqTable {
 public:
  explicit SortedFreqTable(std::vector<SymbolFreq> entries)
      : entries_(std::move(entries)) {
    if (entries_.size() < 2) {
      throw Error(ErrorKind::invalid_input,
                  "frequency table needs at least 2 symbols, got " +
                      std::to_string(entries_.size()));
    }
    std::unordered_set<Symbol> seen;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.freq == 0) {
        throw Error(ErrorKind::invalid_input,
                    "frequency of symbol " + std::to_string(e.symbol) +
                        " must be positive");
      }
      if (!seen.insert(e.symbol).second) {
        throw Error(ErrorKind::invalid_input,
                    "duplicate symbol " + std::to_string(e.symbol));
      }
      if (i > 0 && entries_[i - 1].freq > e.freq) {
        throw Error(ErrorKind::invalid_input,
                    "input not sorted by frequency (row " +
                        std::to_string(i + 1) + ")");
      }
    }
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const SymbolFreq& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const SymbolFreq> entries() const noexcept { return entries_; }

 private:
  std::vector<SymbolFreq> entries_;
};

/// A child slot of an internal node: either a leaf symbol or a reference to
/// some earlier internal node (which one is recorded by parent_address).
struct NodeRef {
  bool internal = false;
  Symbol symbol = 0;

  static constexpr NodeRef leaf(Symbol s) { return NodeRef{false, s}; }
  static constexpr NodeRef internal_node() { return NodeRef{true, 0}; }

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

/// Left/Right/ParentAddress arrays. Internal node t is created at step t;
/// the root is the last one, index num_internal - 1.
struct HuffmanTreeArrays {
  std::vector<NodeRef> left;
  std::vector<NodeRef> right;
  std::vector<std::optional<std::size_t>> parent_address;
  std::size_t num_internal = 0;

  friend bool operator==(const HuffmanTreeArrays&,
                         const HuffmanTreeArrays&) = default;
};

using BitLengthTable = std::map<Symbol, std::uint32_t>;

/// Counters filled by build_tree_restructured when requested.
struct BuildTrace {
  std::size_t node_creations = 0;
  std::size_t reorder_operations = 0;
  std::vector<Frequency> internal_freqs;
};

namespace detail {

inline Frequency checked_add(Frequency a, Frequency b) {
  Frequency sum = 0;
  if (__builtin_add_overflow(a, b, &sum)) {
    throw Error(ErrorKind::overflow, "frequency accumulator overflow");
  }
  return sum;
}

}  // namespace detail

/**
 * Software oracle: repeatedly merge the two lowest-frequency nodes.
 *
 * Ties are broken by creation order (leaves in table order, then internal
 * nodes in the order they were made), so the result is deterministic.
 */
inline BitLengthTable build_tree_reference(const SortedFreqTable& table) {
  const std::size_t n = table.size();
  struct Item {
    Frequency freq;
    std::size_t order;
    bool operator>(const Item& o) const {
      return freq != o.freq ? freq > o.freq : order > o.order;
    }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  // parent[node] for leaves 0..n-1 and internal nodes n..2n-2
  std::vector<std::size_t> parent(2 * n - 1, 0);
  for (std::size_t i = 0; i < n; ++i) heap.push({table[i].freq, i});

  std::size_t next = n;
  while (heap.size() > 1) {
    const Item a = heap.top();
    heap.pop();
    const Item b = heap.top();
    heap.pop();
    parent[a.order] = next;
    parent[b.order] = next;
    heap.push({detail::checked_add(a.freq, b.freq), next});
    ++next;
  }

  const std::size_t root = 2 * n - 2;
  std::vector<std::uint32_t> depth(2 * n - 1, 0);
  // parents always have larger indices than their children
  for (std::size_t node = root; node-- > 0;) {
    depth[node] = depth[parent[node]] + 1;
  }
  BitLengthTable lengths;
  for (std::size_t i = 0; i < n; ++i) lengths[table[i].symbol] = depth[i];
  return lengths;
}

/**
 * Single forward pass over the sorted leaves (cursor i) and the queue of
 * created internal nodes (cursor j, written at k). Each child takes the
 * leaf when SF[i].freq <= IN[j].freq. The first loop runs while leaves
 * remain; the second drains the internal queue.
 */
inline HuffmanTreeArrays build_tree_restructured(const SortedFreqTable& table,
                                                 BuildTrace* trace = nullptr) {
  const std::size_t n = table.size();
  const std::size_t nodes = n - 1;

  HuffmanTreeArrays out;
  out.num_internal = nodes;
  out.left.resize(nodes);
  out.right.resize(nodes);
  out.parent_address.assign(nodes, std::nullopt);

  std::vector<Frequency> in(nodes, 0);
  std::size_t i = 0;  // next unread leaf
  std::size_t j = 0;  // next unconsumed internal node
  std::size_t k = 0;  // next internal node to write

  constexpr Frequency kExhausted = std::numeric_limits<Frequency>::max();
  auto leaf_freq = [&] { return i < n ? table[i].freq : kExhausted; };
  auto internal_freq = [&] { return j < k ? in[j] : kExhausted; };

  auto take_child = [&](NodeRef& slot) -> Frequency {
    if (i < n && leaf_freq() <= internal_freq()) {
      slot = NodeRef::leaf(table[i].symbol);
      return table[i++].freq;
    }
    slot = NodeRef::internal_node();
    out.parent_address[j] = k;
    return in[j++];
  };

  auto create_node = [&] {
    const Frequency lf = take_child(out.left[k]);
    const Frequency rf = take_child(out.right[k]);
    in[k] = detail::checked_add(lf, rf);
    if (trace) {
      ++trace->node_creations;
      trace->internal_freqs.push_back(in[k]);
    }
    ++k;
  };

  while (i < n) create_node();
  // at least two pending internal nodes means another merge is needed
  while (j + 1 < k) create_node();

  return out;
}

/**
 * Depth of every internal node from parent_address (parents always follow
 * their children), then leaf length = depth of owning node + 1.
 */
inline BitLengthTable compute_bit_lengths(const HuffmanTreeArrays& arrays,
                                          const SortedFreqTable& table) {
  const std::size_t n = table.size();
  const std::size_t nodes = arrays.num_internal;
  if (nodes != n - 1 || arrays.left.size() != nodes ||
      arrays.right.size() != nodes || arrays.parent_address.size() != nodes) {
    throw Error(ErrorKind::structural,
                "node arrays must all have extent n - 1 = " +
                    std::to_string(n - 1));
  }
  const std::size_t root = nodes - 1;
  if (arrays.parent_address[root].has_value()) {
    throw Error(ErrorKind::structural, "root must not have a parent address");
  }

  std::vector<std::size_t> internal_children(nodes, 0);
  std::vector<std::size_t> claimed_children(nodes, 0);
  for (std::size_t t = 0; t < nodes; ++t) {
    internal_children[t] = static_cast<std::size_t>(arrays.left[t].internal) +
                           static_cast<std::size_t>(arrays.right[t].internal);
  }
  std::vector<std::uint32_t> depth(nodes, 0);
  for (std::size_t t = root; t-- > 0;) {
    const auto& parent = arrays.parent_address[t];
    if (!parent.has_value()) {
      throw Error(ErrorKind::structural,
                  "internal node " + std::to_string(t) + " has no parent");
    }
    if (*parent <= t || *parent >= nodes) {
      throw Error(ErrorKind::structural,
                  "parent address of node " + std::to_string(t) +
                      " does not point forward (cycle or out of range)");
    }
    if (++claimed_children[*parent] > internal_children[*parent]) {
      throw Error(ErrorKind::structural,
                  "node " + std::to_string(*parent) +
                      " has more internal children than slots");
    }
    depth[t] = depth[*parent] + 1;
  }
  for (std::size_t t = 0; t < nodes; ++t) {
    if (claimed_children[t] != internal_children[t]) {
      throw Error(ErrorKind::structural,
                  "internal child slots of node " + std::to_string(t) +
                      " do not match parent addresses");
    }
  }

  std::unordered_set<Symbol> known;
  for (const auto& e : table.entries()) known.insert(e.symbol);
  BitLengthTable lengths;
  auto record = [&](const NodeRef& ref, std::size_t t) {
    if (ref.internal) return;
    if (!known.contains(ref.symbol)) {
      throw Error(ErrorKind::structural,
                  "leaf symbol " + std::to_string(ref.symbol) +
                      " is not in the frequency table");
    }
    if (!lengths.emplace(ref.symbol, depth[t] + 1).second) {
      throw Error(ErrorKind::structural,
                  "leaf symbol " + std::to_string(ref.symbol) +
                      " appears more than once");
    }
  };
  for (std::size_t t = 0; t < nodes; ++t) {
    record(arrays.left[t], t);
    record(arrays.right[t], t);
  }
  if (lengths.size() != n) {
    throw Error(ErrorKind::structural, "tree does not cover every symbol");
  }
  return lengths;
}

/// Sum of freq * length over the table. Throws on overflow.
inline Frequency weighted_length(const SortedFreqTable& table,
                                 const BitLengthTable& lengths) {
  Frequency total = 0;
  for (const auto& e : table.entries()) {
    const auto it = lengths.find(e.symbol);
    if (it == lengths.end()) {
      throw Error(ErrorKind::invalid_input,
                  "no length for symbol " + std::to_string(e.symbol));
    }
    Frequency term = 0;
    if (__builtin_mul_overflow(e.freq, Frequency{it->second}, &term)) {
      throw Error(ErrorKind::overflow, "weighted length overflow");
    }
    total = detail::checked_add(total, term);
  }
  return total;
}

/// Exact test of sum(2^-len) == 1, carrying counts from the deepest level up.
inline bool kraft_equality(const BitLengthTable& lengths) {
  if (lengths.empty()) return false;
  std::uint32_t max_len = 0;
  for (const auto& [sym, len] : lengths) {
    if (len == 0) return false;
    max_len = std::max(max_len, len);
  }
  std::vector<std::uint64_t> count(max_len + 1, 0);
  for (const auto& [sym, len] : lengths) ++count[len];
  for (std::uint32_t level = max_len; level > 0; --level) {
    if (count[level] % 2 != 0) return false;
    count[level - 1] += count[level] / 2;
  }
  return count[0] == 1;
}

}  // namespace hlsr::huffman
