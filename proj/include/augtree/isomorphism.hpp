#pragma once

// Isomorphism of small vertex-colored graphs with typed edges, by color refinement
// followed by backtracking.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace augtree {

struct ColoredGraph {
  std::vector<int> color;
  std::vector<std::uint8_t> edge;  // n*n, 0 = none, otherwise the edge type

  explicit ColoredGraph(std::size_t n = 0) : color(n, 0), edge(n * n, 0) {}
  std::size_t size() const noexcept { return color.size(); }
  std::uint8_t at(std::size_t a, std::size_t b) const { return edge[a * size() + b]; }
  void connect(std::size_t a, std::size_t b, std::uint8_t type) {
    edge[a * size() + b] = type;
    edge[b * size() + a] = type;
  }
};

enum class IsoResult { isomorphic, not_isomorphic, budget_exhausted };

namespace detail {

// Joint 1-dimensional Weisfeiler-Leman refinement so colors are comparable across graphs.
inline std::pair<std::vector<int>, std::vector<int>> refine_colors(const ColoredGraph& g,
                                                                   const ColoredGraph& h) {
  std::vector<int> cg = g.color, ch = h.color;
  std::size_t classes = 0;
  while (true) {
    using Key = std::pair<int, std::vector<std::pair<int, int>>>;
    auto key_of = [](const ColoredGraph& x, const std::vector<int>& c, std::size_t v) {
      Key k{c[v], {}};
      for (std::size_t u = 0; u < x.size(); ++u)
        if (x.at(v, u)) k.second.emplace_back(x.at(v, u), c[u]);
      std::sort(k.second.begin(), k.second.end());
      return k;
    };
    std::map<Key, int> names;
    std::vector<Key> kg, kh;
    for (std::size_t v = 0; v < g.size(); ++v) kg.push_back(key_of(g, cg, v));
    for (std::size_t v = 0; v < h.size(); ++v) kh.push_back(key_of(h, ch, v));
    for (const auto& k : kg) names.emplace(k, 0);
    for (const auto& k : kh) names.emplace(k, 0);
    int next = 0;
    for (auto& [k, id] : names) id = next++;
    for (std::size_t v = 0; v < g.size(); ++v) cg[v] = names[kg[v]];
    for (std::size_t v = 0; v < h.size(); ++v) ch[v] = names[kh[v]];
    if (names.size() == classes) break;
    classes = names.size();
  }
  return {cg, ch};
}

}  // namespace detail

/// Decides whether a bijection g -> h preserving colors and edge types exists.
inline IsoResult isomorphic(const ColoredGraph& g, const ColoredGraph& h,
                            std::size_t node_budget = 2'000'000) {
  const std::size_t n = g.size();
  if (n != h.size()) return IsoResult::not_isomorphic;
  if (n == 0) return IsoResult::isomorphic;
  auto [cg, ch] = detail::refine_colors(g, h);
  {
    auto sg = cg, sh = ch;
    std::sort(sg.begin(), sg.end());
    std::sort(sh.begin(), sh.end());
    if (sg != sh) return IsoResult::not_isomorphic;
  }

  // Visit order: BFS from the rarest color so each vertex tends to have a mapped neighbor.
  std::vector<std::size_t> order;
  std::vector<std::size_t> anchor(n, n);
  {
    std::map<int, std::size_t> freq;
    for (int c : cg) ++freq[c];
    std::vector<bool> seen(n, false);
    while (order.size() < n) {
      std::size_t start = n;
      for (std::size_t v = 0; v < n; ++v)
        if (!seen[v] && (start == n || freq[cg[v]] < freq[cg[start]])) start = v;
      seen[start] = true;
      std::vector<std::size_t> queue{start};
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::size_t v = queue[qi];
        order.push_back(v);
        for (std::size_t u = 0; u < n; ++u)
          if (!seen[u] && g.at(v, u)) {
            seen[u] = true;
            anchor[u] = v;
            queue.push_back(u);
          }
      }
    }
  }

  std::vector<std::size_t> map(n, n);
  std::vector<bool> used(n, false);
  std::size_t nodes = 0;
  bool exhausted = false;

  auto consistent = [&](std::size_t v, std::size_t w) {
    if (cg[v] != ch[w] || used[w]) return false;
    for (std::size_t u = 0; u < n; ++u)
      if (map[u] != n && g.at(v, u) != h.at(w, map[u])) return false;
    return true;
  };

  auto search = [&](auto&& self, std::size_t depth) -> bool {
    if (depth == n) return true;
    if (++nodes > node_budget) {
      exhausted = true;
      return false;
    }
    const std::size_t v = order[depth];
    for (std::size_t w = 0; w < n; ++w) {
      if (anchor[v] != n && !h.at(map[anchor[v]], w)) continue;
      if (!consistent(v, w)) continue;
      map[v] = w;
      used[w] = true;
      if (self(self, depth + 1)) return true;
      map[v] = n;
      used[w] = false;
      if (exhausted) return false;
    }
    return false;
  };

  if (search(search, 0)) return IsoResult::isomorphic;
  return exhausted ? IsoResult::budget_exhausted : IsoResult::not_isomorphic;
}

}  // namespace augtree
