#pragma once

// Lazily explored augmented tree with exact graph distances and Gromov products.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "augtree/classify.hpp"

namespace augtree {

class AugmentedTree {
 public:
  struct Location {
    std::size_t component;
    std::size_t member;
  };

  explicit AugmentedTree(const Geometry& geo, std::optional<std::size_t> max_level = std::nullopt)
      : geo_(&geo), max_level_(max_level.value_or(geo.spec().caps.max_depth)) {
    add(root_component(geo.spec()));
  }

  const Geometry& geometry() const noexcept { return *geo_; }
  std::size_t max_level() const noexcept { return max_level_; }
  std::size_t component_count() const noexcept { return comps_.size(); }
  const Component& component(std::size_t id) const { return comps_.at(id).value; }

  /// Component ids produced by expanding `id`, in canonical order.
  const std::vector<std::size_t>& offspring(std::size_t id) {
    if (!comps_.at(id).children) {
      if (comps_[id].value.level >= max_level_)
        throw PreconditionError("level " + std::to_string(comps_[id].value.level + 1) +
                                " beyond explored depth " + std::to_string(max_level_));
      std::vector<std::size_t> ids;
      for (auto& c : expand_component(*geo_, comps_[id].value)) ids.push_back(add(std::move(c)));
      comps_[id].children = std::move(ids);
    }
    return *comps_[id].children;
  }

  /// All components at `level`, in canonical order.
  std::vector<std::size_t> components_at(std::size_t level) {
    std::vector<std::size_t> cur{0};
    for (std::size_t n = 0; n < level; ++n) {
      std::vector<std::size_t> next;
      for (auto id : cur) {
        const auto& kids = offspring(id);
        next.insert(next.end(), kids.begin(), kids.end());
      }
      cur = std::move(next);
    }
    return cur;
  }

  Location locate(const Word& w) {
    if (w.size() > max_level_)
      throw PreconditionError("word " + word_to_string(w) + " beyond explored depth " +
                              std::to_string(max_level_));
    if (auto it = where_.find(w); it != where_.end()) return it->second;
    for (auto d : w)
      if (d < 1 || d > geo_->spec().maps()) throw PreconditionError("invalid digit in word " + word_to_string(w));
    const Location up = locate(Word(w.begin(), w.end() - 1));
    offspring(up.component);
    return where_.at(w);
  }

  /// Horizontal distance between same-level words, or nullopt if in different components.
  std::optional<std::size_t> horizontal_distance(const Word& x, const Word& y) {
    const Location a = locate(x), b = locate(y);
    if (a.component != b.component) return std::nullopt;
    auto& entry = comps_[a.component];
    if (entry.dist.empty()) entry.dist = graph_distances(horizontal_graph(*geo_, entry.value));
    return entry.dist[a.member * entry.value.size() + b.member];
  }

  /// Graph distance in the augmented tree; with stride k, in the tree over levels 0, k, 2k, ...
  std::size_t distance(const Word& x, const Word& y, std::size_t stride = 1) {
    if (x.size() % stride || y.size() % stride)
      throw PreconditionError("word length not a multiple of the stride");
    const std::size_t lx = x.size() / stride, ly = y.size() / stride;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t l = 0; l <= std::min(lx, ly); ++l) {
      const Word ax(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(l * stride));
      const Word ay(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(l * stride));
      const auto h = horizontal_distance(ax, ay);
      if (h) best = std::min(best, (lx - l) + (ly - l) + *h);
    }
    return best;
  }

  /// (|x| + |y| - d(x, y)) / 2.
  Rational gromov_product(const Word& x, const Word& y, std::size_t stride = 1) {
    const std::size_t d = distance(x, y, stride);
    return Rational(static_cast<long long>(x.size() / stride + y.size() / stride) - static_cast<long long>(d), 2);
  }

  /// Expands every component up to `level` and caches all horizontal distances, after
  /// which distance_explored() may be called concurrently.
  void explore(std::size_t level) {
    for (std::size_t n = 0; n <= level; ++n)
      for (auto id : components_at(n))
        if (comps_[id].dist.empty()) comps_[id].dist = graph_distances(horizontal_graph(*geo_, comps_[id].value));
    explored_ = std::max(explored_, level);
  }

  std::size_t explored_level() const noexcept { return explored_; }

  std::size_t distance_explored(const Word& x, const Word& y, std::size_t stride = 1) const {
    if (x.size() > explored_ || y.size() > explored_)
      throw PreconditionError("distance_explored: word beyond explored level");
    const std::size_t lx = x.size() / stride, ly = y.size() / stride;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t l = 0; l <= std::min(lx, ly); ++l) {
      const Location a = where_.at(Word(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(l * stride)));
      const Location b = where_.at(Word(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(l * stride)));
      if (a.component != b.component) continue;
      const auto& entry = comps_[a.component];
      best = std::min(best, (lx - l) + (ly - l) + entry.dist[a.member * entry.value.size() + b.member]);
    }
    return best;
  }

 private:
  struct Entry {
    Component value;
    std::optional<std::vector<std::size_t>> children;
    std::vector<std::size_t> dist;
  };

  std::size_t add(Component c) {
    const std::size_t id = comps_.size();
    for (std::size_t i = 0; i < c.size(); ++i) where_.emplace(c.members[i].word, Location{id, i});
    comps_.push_back(Entry{std::move(c), std::nullopt, {}});
    return id;
  }

  const Geometry* geo_;
  std::size_t max_level_;
  std::size_t explored_ = 0;
  std::vector<Entry> comps_;
  std::map<Word, Location> where_;
};

/// Distance in the plain tree of words (no horizontal edges).
inline std::size_t tree_distance(const Word& x, const Word& y, std::size_t stride = 1) {
  std::size_t common = 0;
  while (common < x.size() && common < y.size() && x[common] == y[common]) ++common;
  common /= stride;
  return x.size() / stride + y.size() / stride - 2 * common;
}

}  // namespace augtree
