#pragma once

// Visual metric on words, the point map into the attractor, and sampled diagnostics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "augtree/tree_metric.hpp"

namespace augtree {

/// exp(-a |x ∧ y|), and 0 on the diagonal.
inline double rho_a(AugmentedTree& tree, const Word& x, const Word& y, double a) {
  if (x == y) return 0.0;
  return std::exp(-a * static_cast<double>(tree.gromov_product(x, y)));
}

/// S_w(x0) = B^{-|w|}(G_w x0 + t_w), exactly.
inline RatVector phi_point(const IfsSpec& spec, const Word& w, const RatVector& x0) {
  const CellState cell = cell_of_word(spec, w);
  RatVector v = to_rational(cell.linear) * x0;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += Rational(cell.translation[i]);
  const RatMatrix b_inv = inverse(to_rational(spec.matrix));
  for (std::size_t n = 0; n < w.size(); ++n) v = b_inv * v;
  return v;
}

/// Fixed point of the first map, a point of the attractor.
inline RatVector first_fixed_point(const IfsSpec& spec) {
  RatMatrix shifted = to_rational(spec.matrix);
  const RatMatrix r1 = to_rational(spec.linear_parts.front());
  for (std::size_t i = 0; i < spec.dimension; ++i)
    for (std::size_t j = 0; j < spec.dimension; ++j) shifted(i, j) -= r1(i, j);
  return inverse(shifted) * to_rational(spec.digits.front());
}

inline double euclidean(const RatVector& a, const RatVector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(Rational(a[i] - b[i]));
    s += d * d;
  }
  return std::sqrt(s);
}

/// |Φx - Φy| / ρ_a(x, y)^α for distinct words of equal length.
inline double holder_ratio(AugmentedTree& tree, const Word& x, const Word& y, double a, double alpha,
                           const RatVector& x0) {
  if (x == y) throw PreconditionError("holder ratio needs distinct words");
  const IfsSpec& spec = tree.geometry().spec();
  return euclidean(phi_point(spec, x, x0), phi_point(spec, y, x0)) / std::pow(rho_a(tree, x, y, a), alpha);
}

struct BoundaryWindow {
  std::size_t depth = 0;
  std::size_t pairs = 0;
  std::size_t coincident = 0;  // pairs skipped because their approximants agree
  double min_ratio = 0;
  double max_ratio = 0;
  double spread = 0;  // max / min
};

struct BoundarySample {
  double a = 0;
  double alpha = 0;
  std::uint64_t seed = 0;
  std::vector<BoundaryWindow> windows;
  double window_factor = 0;  // ratio of the larger to the smaller window spread
};

inline BoundaryWindow sample_window(AugmentedTree& tree, std::size_t depth, std::size_t pair_count, double a,
                                    double alpha, std::uint64_t seed, const RatVector& x0) {
  const IfsSpec& spec = tree.geometry().spec();
  if (depth == 0) throw PreconditionError("holder_sample: depth must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> digit(1, static_cast<std::uint32_t>(spec.maps()));
  BoundaryWindow win;
  win.depth = depth;
  win.min_ratio = INFINITY;
  std::size_t attempts = 0;
  while (win.pairs < pair_count) {
    if (++attempts > 20 * pair_count + 100)
      throw PreconditionError("holder_sample: not enough distinct pairs at depth " + std::to_string(depth));
    Word x(depth), y(depth);
    for (auto& d : x) d = digit(rng);
    for (auto& d : y) d = digit(rng);
    if (x == y) continue;
    const double ratio = holder_ratio(tree, x, y, a, alpha, x0);
    if (ratio == 0) {
      ++win.coincident;
      continue;
    }
    win.min_ratio = std::min(win.min_ratio, ratio);
    win.max_ratio = std::max(win.max_ratio, ratio);
    ++win.pairs;
  }
  win.spread = win.max_ratio / win.min_ratio;
  return win;
}

/// Ratios |Φx - Φy| / ρ_a(x, y)^α over seeded random pairs at `depth` and `depth + 3`.
inline BoundarySample holder_sample(AugmentedTree& tree, std::size_t depth, std::size_t pair_count, double a,
                                    std::uint64_t seed) {
  const IfsSpec& spec = tree.geometry().spec();
  if (a <= 0) throw PreconditionError("holder_sample: a must be positive");
  BoundarySample out;
  out.a = a;
  out.alpha = -std::log(spec.ratio()) / a;
  out.seed = seed;
  const RatVector x0 = first_fixed_point(spec);
  for (std::size_t w = 0; w < 2; ++w)
    out.windows.push_back(sample_window(tree, depth + 3 * w, pair_count, a, out.alpha, seed + w, x0));
  const double s0 = out.windows[0].spread, s1 = out.windows[1].spread;
  out.window_factor = std::max(s0, s1) / std::min(s0, s1);
  return out;
}

struct DeltaEstimate {
  std::size_t depth = 0;
  bool exhaustive = true;
  std::uint64_t triples = 0;
  Rational delta = 0;
};

/// max over triples of min(|x∧z|, |z∧y|) - |x∧y|, clipped at 0, over words of level <= depth.
inline DeltaEstimate hyperbolicity_delta_sample(AugmentedTree& tree, std::size_t depth,
                                                std::size_t max_exhaustive_words = 400,
                                                std::uint64_t samples = 20'000, std::uint64_t seed = 1) {
  const std::size_t m = tree.geometry().spec().maps();
  std::uint64_t total = 0, level_count = 1;
  for (std::size_t n = 0; n <= depth && total <= max_exhaustive_words; ++n, level_count *= m) total += level_count;
  DeltaEstimate est;
  est.depth = depth;
  std::int64_t best = 0;  // twice delta
  auto twice_gromov = [&](const Word& x, const Word& y) {
    return static_cast<std::int64_t>(x.size() + y.size()) - static_cast<std::int64_t>(tree.distance(x, y));
  };
  if (total <= max_exhaustive_words) {
    std::vector<Word> words{Word{}};
    for (std::size_t start = 0; start < words.size(); ++start) {
      if (words[start].size() >= depth) continue;
      for (std::uint32_t i = 1; i <= m; ++i) {
        Word w = words[start];
        w.push_back(i);
        words.push_back(std::move(w));
      }
    }
    const std::size_t n = words.size();
    std::vector<std::int64_t> g(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g[i * n + j] = g[j * n + i] = twice_gromov(words[i], words[j]);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x; y < n; ++y)
        for (std::size_t z = 0; z < n; ++z)
          best = std::max(best, std::min(g[x * n + z], g[z * n + y]) - g[x * n + y]);
    est.triples = static_cast<std::uint64_t>(n) * (n + 1) / 2 * n;
  } else {
    est.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> level(0, depth);
    std::uniform_int_distribution<std::uint32_t> digit(1, static_cast<std::uint32_t>(m));
    auto random_word = [&] {
      Word w(level(rng));
      for (auto& d : w) d = digit(rng);
      return w;
    };
    for (std::uint64_t s = 0; s < samples; ++s) {
      const Word x = random_word(), y = random_word(), z = random_word();
      best = std::max(best, std::min(twice_gromov(x, z), twice_gromov(z, y)) - twice_gromov(x, y));
    }
    est.triples = samples;
  }
  est.delta = Rational(best, 2);
  return est;
}

}  // namespace augtree
