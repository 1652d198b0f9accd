#pragma once

// Exact horizontal-edge predicate: do two same-level cells intersect?

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "augtree/errors.hpp"
#include "augtree/ifs_model.hpp"
#include "augtree/linalg.hpp"

namespace augtree {

enum class NeighborProvenance { computed, user_supplied, box_predicate };

inline const char* to_string(NeighborProvenance p) {
  switch (p) {
    case NeighborProvenance::computed: return "computed";
    case NeighborProvenance::user_supplied: return "user-supplied";
    case NeighborProvenance::box_predicate: return "box-predicate";
  }
  return "?";
}

/// Lattice vectors s != 0 with J ∩ (J + s) nonempty; kept sorted.
struct NeighborSet {
  std::vector<IntVector> vectors;
  NeighborProvenance provenance = NeighborProvenance::computed;

  bool contains(const IntVector& s) const {
    return std::binary_search(vectors.begin(), vectors.end(), s);
  }
  std::size_t size() const noexcept { return vectors.size(); }
};

/// Neighbors of the tile J with BJ = J + full_digits.
///
/// A point-difference s = x - y (x, y in J) satisfies s = B^{-1}(s' + d - d') for a
/// difference s' of the same kind, so the neighbor set is the set of states of the
/// contact graph s -> B s + d' - d that start an infinite path. All such states lie in
/// the ball of radius 2R around 0, where R bounds |x| over J.
inline NeighborSet compute_neighbor_set(const IntMatrix& matrix,
                                        const std::vector<IntVector>& full_digits) {
  const std::size_t d = matrix.rows();
  const Integer q = abs(determinant(matrix));
  if (Integer(full_digits.size()) != q)
    throw SpecError("tile-digits", "full digit set needs |det B| = " + q.str() + " elements");

  const RatMatrix b_inv = inverse(to_rational(matrix));
  RatMatrix b_inv_k = b_inv;
  unsigned k = 1;
  for (; k <= 64; ++k) {
    if (infinity_norm(b_inv_k) < 1) break;
    b_inv_k = b_inv_k * b_inv;
  }
  if (k > 64) throw SpecError("non-expanding", "B^{-k} does not contract for k <= 64");

  // |sum_{i<=k} B^{-i} d_i| <= sum_i max_d |B^{-i} d|.
  Rational block_bound = 0;
  RatMatrix b_inv_i = b_inv;
  for (unsigned i = 1; i <= k; ++i) {
    Rational best = 0;
    for (const auto& digit : full_digits) best = std::max(best, infinity_norm(b_inv_i * to_rational(digit)));
    block_bound += best;
    b_inv_i = b_inv_i * b_inv;
  }
  const Rational radius = block_bound / (Rational(1) - infinity_norm(b_inv_k));
  const Integer reach = floor(2 * radius);
  if (boost::multiprecision::pow(2 * reach + 1, static_cast<unsigned>(d)) > 4'000'000)
    throw CapExceeded("neighbor search ball too large: radius " + reach.str());
  const long r = static_cast<long>(reach);

  // Enumerate the candidate cube, including 0 (the diagonal, which loops to itself).
  std::vector<IntVector> states;
  IntVector cur(d, Integer(-r));
  while (true) {
    states.push_back(cur);
    std::size_t pos = 0;
    while (pos < d && cur[pos] == r) cur[pos++] = -r;
    if (pos == d) break;
    ++cur[pos];
  }
  std::map<IntVector, std::size_t> index;
  for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i], i);

  std::set<IntVector> diffs;
  for (const auto& a : full_digits)
    for (const auto& b : full_digits) diffs.insert(subtract(a, b));

  std::vector<std::vector<std::size_t>> out_edges(states.size());
  std::vector<std::vector<std::size_t>> in_edges(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const IntVector image = matrix * states[i];
    for (const auto& delta : diffs) {
      auto it = index.find(add(image, delta));
      if (it == index.end()) continue;
      out_edges[i].push_back(it->second);
      in_edges[it->second].push_back(i);
    }
  }

  // Repeatedly drop states without a surviving successor.
  std::vector<std::size_t> out_degree(states.size());
  std::vector<bool> alive(states.size(), true);
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < states.size(); ++i) {
    out_degree[i] = out_edges[i].size();
    if (out_degree[i] == 0) queue.push_back(i);
  }
  while (!queue.empty()) {
    const std::size_t v = queue.back();
    queue.pop_back();
    if (!alive[v]) continue;
    alive[v] = false;
    for (auto u : in_edges[v])
      if (alive[u] && --out_degree[u] == 0) queue.push_back(u);
  }

  NeighborSet result;
  result.provenance = NeighborProvenance::computed;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (alive[i] && !is_zero(states[i])) result.vectors.push_back(states[i]);
  std::sort(result.vectors.begin(), result.vectors.end());
  return result;
}

/// Realized axis-aligned box of a cell under the box backend (scaled by B^level).
struct RealizedBox {
  IntVector lo;
  IntVector hi;
};

/// Adjacency oracle for one validated IFS. Owns its spec.
class Geometry {
 public:
  explicit Geometry(IfsSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    if (const auto* tile = std::get_if<Tile>(&spec_.invariant_set)) {
      neighbors_ = compute_neighbor_set(spec_.matrix, tile->full_digits);
    } else if (const auto* custom = std::get_if<CustomNeighbors>(&spec_.invariant_set)) {
      NeighborSet n;
      n.vectors = custom->vectors;
      std::sort(n.vectors.begin(), n.vectors.end());
      n.vectors.erase(std::unique(n.vectors.begin(), n.vectors.end()), n.vectors.end());
      n.provenance = NeighborProvenance::user_supplied;
      neighbors_ = std::move(n);
    }
  }

  const IfsSpec& spec() const noexcept { return spec_; }
  bool box_backend() const noexcept { return !neighbors_.has_value(); }
  const std::optional<NeighborSet>& neighbors() const noexcept { return neighbors_; }

  RealizedBox realize(const CellState& cell) const {
    const auto& box = std::get<Box>(spec_.invariant_set);
    const std::size_t d = spec_.dimension;
    RealizedBox out{IntVector(d), IntVector(d)};
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        const Integer& g = cell.linear(r, c);
        if (g == 0) continue;
        if (g > 0) {
          out.lo[r] = box.corner[c] + cell.translation[r];
          out.hi[r] = box.corner[c] + box.side + cell.translation[r];
        } else {
          out.lo[r] = -box.corner[c] - box.side + cell.translation[r];
          out.hi[r] = -box.corner[c] + cell.translation[r];
        }
        break;
      }
    }
    return out;
  }

  /// Closed-set intersection of two same-level cells (touching counts).
  bool adjacent(const CellState& a, const CellState& b) const {
    if (a.level != b.level)
      throw PreconditionError("adjacent: levels differ (" + std::to_string(a.level) + " vs " +
                              std::to_string(b.level) + ")");
    if (neighbors_) {
      const IntVector diff = subtract(b.translation, a.translation);
      return is_zero(diff) || neighbors_->contains(diff);
    }
    const RealizedBox ra = realize(a);
    const RealizedBox rb = realize(b);
    for (std::size_t k = 0; k < spec_.dimension; ++k)
      if (ra.hi[k] < rb.lo[k] || rb.hi[k] < ra.lo[k]) return false;
    return true;
  }

  /// All adjacent index pairs (i < j) among same-level cells. Equivalent to testing
  /// every pair with adjacent(), without the quadratic cost.
  std::vector<std::pair<std::size_t, std::size_t>> adjacent_pairs(std::span<const CellState> cells) const {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (cells.empty()) return pairs;
    if (neighbors_) {
      std::multimap<IntVector, std::size_t> at;
      for (std::size_t i = 0; i < cells.size(); ++i) at.emplace(cells[i].translation, i);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        auto [lo, hi] = at.equal_range(cells[i].translation);
        for (auto it = lo; it != hi; ++it)
          if (it->second > i) pairs.emplace_back(i, it->second);
        for (const auto& s : neighbors_->vectors) {
          auto [l2, h2] = at.equal_range(add(cells[i].translation, s));
          for (auto it = l2; it != h2; ++it)
            if (it->second > i) pairs.emplace_back(i, it->second);
        }
      }
    } else {
      // Sweep on the first coordinate; all realized boxes share the same extent.
      std::vector<RealizedBox> boxes;
      boxes.reserve(cells.size());
      for (const auto& c : cells) boxes.push_back(realize(c));
      std::vector<std::size_t> order(cells.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return boxes[a].lo[0] < boxes[b].lo[0]; });
      for (std::size_t x = 0; x < order.size(); ++x) {
        const auto& bx = boxes[order[x]];
        for (std::size_t y = x + 1; y < order.size(); ++y) {
          const auto& by = boxes[order[y]];
          if (by.lo[0] > bx.hi[0]) break;
          bool touch = true;
          for (std::size_t k = 1; k < spec_.dimension && touch; ++k)
            touch = !(bx.hi[k] < by.lo[k] || by.hi[k] < bx.lo[k]);
          if (touch) pairs.emplace_back(std::min(order[x], order[y]), std::max(order[x], order[y]));
        }
      }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
  }

 private:
  IfsSpec spec_;
  std::optional<NeighborSet> neighbors_;
};

}  // namespace augtree
