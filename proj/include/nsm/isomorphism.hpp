// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "nsm/graph.hpp"
#include "nsm/graph_io.hpp"

namespace nsm {

// An injective query-node -> data-node map; to_data[q] is the image of q.
struct NodeMapping {
  std::vector<NodeId> to_data;
};

enum class Verdict { match, no_match, timeout };

struct OracleOutcome {
  Verdict verdict = Verdict::no_match;
  NodeMapping mapping;  // populated iff verdict == match
  double elapsed_seconds = 0.0;
  std::uint64_t nodes_explored = 0;
};

// Timeouts are enforced as a deterministic search-step budget so that verdicts
// (and everything downstream, e.g. sampler accept/reject decisions) are
// bit-reproducible; elapsed wall time is reported for information only.
inline constexpr std::uint64_t kSearchStepsPerMs = 10'000;

// True iff m is total over q, injective, label-preserving, and every query
// edge lands on a data edge: each entry of the permuted-adjacency difference
// is in {0,1}, so their sum is non-negative.
inline bool verify_mapping(const LabeledGraph& q, const LabeledGraph& d, const NodeMapping& m) {
  const int nq = q.node_count();
  if (static_cast<int>(m.to_data.size()) != nq)
    throw std::invalid_argument("verify_mapping: mapping not total over query nodes");
  std::vector<char> used(d.node_count(), 0);
  for (NodeId v = 0; v < nq; ++v) {
    NodeId u = m.to_data[v];
    if (!d.valid_node(u)) throw std::invalid_argument("verify_mapping: mapped id out of range");
    if (used[u]) return false;
    used[u] = 1;
    if (q.label(v) != d.label(u)) return false;
  }
  for (const auto& [a, b] : q.edges())
    if (!d.has_edge(m.to_data[a], m.to_data[b])) return false;
  return true;
}

namespace detail {

// Connected, rarest-label-first query node order. Rarity is the candidate
// count in the data graph; ties break on the lowest query id.
inline std::vector<NodeId> matching_order(const LabeledGraph& q,
                                          const std::vector<int>& data_label_count) {
  const int nq = q.node_count();
  std::vector<char> placed(nq, 0);
  std::vector<NodeId> order;
  order.reserve(nq);
  auto rarity = [&](NodeId v) { return data_label_count[q.label(v)]; };
  while (static_cast<int>(order.size()) < nq) {
    NodeId best = -1;
    bool best_connected = false;
    for (NodeId v = 0; v < nq; ++v) {
      if (placed[v]) continue;
      bool connected = false;
      for (NodeId w : q.neighbors(v))
        if (placed[w]) {
          connected = true;
          break;
        }
      if (order.empty()) connected = true;
      if (best < 0 || (connected && !best_connected) ||
          (connected == best_connected && rarity(v) < rarity(best)))
        best = v, best_connected = connected;
    }
    placed[best] = 1;
    order.push_back(best);
  }
  return order;
}

}  // namespace detail

// VF2-style backtracking search for a label- and edge-preserving injection of
// q into d. Candidates are filtered by equal label and degree dominance;
// deterministic given the canonical neighbor order.
inline OracleOutcome find_subgraph_isomorphism(const LabeledGraph& q, const LabeledGraph& d,
                                               std::chrono::milliseconds timeout) {
  if (timeout.count() <= 0) throw std::invalid_argument("find_subgraph_isomorphism: timeout <= 0");
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](OracleOutcome out) {
    out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  OracleOutcome out;
  const int nq = q.node_count(), nd = d.node_count();
  if (nq == 0 || nd == 0) throw std::invalid_argument("find_subgraph_isomorphism: empty graph");

  // Fast rejects: size and label-multiset containment are necessary.
  if (nq > nd) return finish(out);
  const int alphabet = std::max(q.max_label(), d.max_label()) + 1;
  std::vector<int> qcount(alphabet, 0), dcount(alphabet, 0);
  for (LabelId l : q.labels()) ++qcount[l];
  for (LabelId l : d.labels()) ++dcount[l];
  for (int l = 0; l < alphabet; ++l)
    if (qcount[l] > dcount[l]) return finish(out);

  const std::vector<NodeId> order = detail::matching_order(q, dcount);
  std::vector<std::vector<NodeId>> candidates(nq);
  for (NodeId v = 0; v < nq; ++v)
    for (NodeId u = 0; u < nd; ++u)
      if (d.label(u) == q.label(v) && d.degree(u) >= q.degree(v)) candidates[v].push_back(u);

  const std::uint64_t budget = static_cast<std::uint64_t>(timeout.count()) * kSearchStepsPerMs;
  std::vector<NodeId> image(nq, -1);
  std::vector<char> used(nd, 0);
  std::vector<std::size_t> cursor(nq, 0);

  int depth = 0;
  while (depth >= 0) {
    if (depth == nq) {
      out.verdict = Verdict::match;
      out.mapping.to_data = image;
      return finish(out);
    }
    const NodeId v = order[depth];
    const auto& cand = candidates[v];
    bool advanced = false;
    while (cursor[depth] < cand.size()) {
      const NodeId u = cand[cursor[depth]++];
      if (++out.nodes_explored > budget) {
        out.verdict = Verdict::timeout;
        return finish(out);
      }
      if (used[u]) continue;
      bool ok = true;
      for (NodeId w : q.neighbors(v)) {
        if (image[w] >= 0 && !d.has_edge(u, image[w])) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      image[v] = u;
      used[u] = 1;
      ++depth;
      advanced = true;
      break;
    }
    if (!advanced) {
      cursor[depth] = 0;
      --depth;
      if (depth >= 0) {
        const NodeId pv = order[depth];
        used[image[pv]] = 0;
        image[pv] = -1;
      }
    }
  }
  out.verdict = Verdict::no_match;
  return finish(out);
}

enum class PairLabel { positive, negative, unknown };

// Labels each (query, data) pair through the matcher; timeout -> unknown.
// Independent pairs may run on worker threads; results keep input order.
inline std::vector<PairLabel> label_pairs(
    const std::vector<std::pair<const LabeledGraph*, const LabeledGraph*>>& pairs,
    std::chrono::milliseconds timeout, int threads = 1) {
  std::vector<PairLabel> labels(pairs.size(), PairLabel::unknown);
  auto work = [&](std::size_t i) {
    const auto outcome = find_subgraph_isomorphism(*pairs[i].first, *pairs[i].second, timeout);
    switch (outcome.verdict) {
      case Verdict::match: labels[i] = PairLabel::positive; break;
      case Verdict::no_match: labels[i] = PairLabel::negative; break;
      case Verdict::timeout: labels[i] = PairLabel::unknown; break;
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < pairs.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool) th.join();
  }
  return labels;
}

struct PairRow {
  int query_index = 0;
  int data_index = 0;
  PairLabel label = PairLabel::unknown;
};

inline const char* pair_label_name(PairLabel l) {
  switch (l) {
    case PairLabel::positive: return "1";
    case PairLabel::negative: return "0";
    default: return "unknown";
  }
}

inline void write_pair_csv(const std::filesystem::path& path, const std::vector<PairRow>& rows) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open pair csv for writing: " + path.string());
  out << "query_graph_index,data_graph_index,label\n";
  for (const auto& r : rows)
    out << r.query_index << "," << r.data_index << "," << pair_label_name(r.label) << "\n";
}

inline std::vector<PairRow> read_pair_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("missing pair csv: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("query_graph_index,", 0) != 0)
    throw FormatError("pair csv missing header: " + path.string());
  std::vector<PairRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto c1 = line.find(',');
    auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw FormatError("bad pair csv row: '" + line + "'");
    PairRow r;
    r.query_index = static_cast<int>(detail::parse_int(line.substr(0, c1), "pair csv"));
    r.data_index = static_cast<int>(detail::parse_int(line.substr(c1 + 1, c2 - c1 - 1), "pair csv"));
    std::string lab = line.substr(c2 + 1);
    if (lab == "1") r.label = PairLabel::positive;
    else if (lab == "0") r.label = PairLabel::negative;
    else if (lab == "unknown") r.label = PairLabel::unknown;
    else throw FormatError("bad pair label: '" + lab + "'");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace nsm
