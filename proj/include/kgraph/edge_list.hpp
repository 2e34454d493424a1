#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgraph {

struct Edge {
  int u, v;
  double w;
};

// Sparse undirected graph as (u, v, w>0) triples, u < v, no duplicates.
struct WeightedEdgeList {
  int n = 0;
  std::vector<Edge> edges;

  WeightedEdgeList() = default;
  explicit WeightedEdgeList(int n_) : n(n_) {}

  void add(int u, int v, double w) {
    if (u == v) throw std::invalid_argument("edge: self loop");
    if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge: vertex out of range");
    if (!(w > 0.0)) throw std::invalid_argument("edge: weight must be positive");
    if (u > v) std::swap(u, v);
    edges.push_back({u, v, w});
  }

  double w_min() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : edges) m = std::min(m, e.w);
    return m;
  }
  double w_max() const {
    double m = 0.0;
    for (const auto& e : edges) m = std::max(m, e.w);
    return m;
  }
  // weight flavor of the ratio alpha
  double weight_ratio() const { return w_max() / w_min(); }

  std::vector<double> degrees() const {
    std::vector<double> deg(n, 0.0);
    for (const auto& e : edges) {
      deg[e.u] += e.w;
      deg[e.v] += e.w;
    }
    return deg;
  }

  // Merges duplicate unordered pairs by weight addition, sorts edges.
  void merge_duplicates() {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (const auto& e : edges) {
      if (!out.empty() && out.back().u == e.u && out.back().v == e.v)
        out.back().w += e.w;
      else
        out.push_back(e);
    }
    edges = std::move(out);
  }

  void validate() const {
    for (const auto& e : edges) {
      if (e.u == e.v || e.u < 0 || e.v >= n || !(e.w > 0.0))
        throw std::invalid_argument("WeightedEdgeList: invalid edge");
    }
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i - 1].u == sorted[i].u && sorted[i - 1].v == sorted[i].v)
        throw std::invalid_argument("WeightedEdgeList: duplicate pair");
  }

  // Connected component labels, 0-based; label count returned.
  int components(std::vector<int>& label) const {
    label.assign(n, -1);
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : edges) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    int c = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
      if (label[s] >= 0) continue;
      stack.push_back(s);
      label[s] = c;
      while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : adj[x])
          if (label[y] < 0) {
            label[y] = c;
            stack.push_back(y);
          }
      }
      ++c;
    }
    return c;
  }

  bool connected() const {
    if (n == 0) return true;
    std::vector<int> label;
    return components(label) == 1;
  }

  void require_connected(const std::string& who) const {
    std::vector<int> label;
    int c = components(label);
    if (c <= 1) return;
    int a = -1, b = -1;
    for (int i = 0; i < n && (a < 0 || b < 0); ++i) {
      if (label[i] == 0) a = (a < 0 ? i : a);
      if (label[i] == 1) b = (b < 0 ? i : b);
    }
    throw std::runtime_error(who + ": graph disconnected (vertex " + std::to_string(a) +
                             " and vertex " + std::to_string(b) + " lie in different components)");
  }
};

}  // namespace kgraph
