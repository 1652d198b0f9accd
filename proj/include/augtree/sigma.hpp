#pragma once

// Level-preserving bijection from the augmented tree onto the plain tree, built from
// rearrangement certificates, plus an audit of its distortion.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "augtree/classify.hpp"
#include "augtree/rearrange.hpp"
#include "augtree/tree_metric.hpp"

namespace augtree {

/// Word <-> index as a base-m number (digit i contributes i-1), most significant first.
inline std::uint64_t word_index(const Word& w, std::size_t m) {
  std::uint64_t idx = 0;
  for (auto d : w) idx = idx * m + (d - 1);
  return idx;
}

inline Word index_word(std::uint64_t idx, std::size_t length, std::size_t m) {
  Word w(length);
  for (std::size_t i = length; i-- > 0;) {
    w[i] = static_cast<std::uint32_t>(idx % m) + 1;
    idx /= m;
  }
  return w;
}

struct PoolRecord {
  std::size_t level = 0;  // level of the parent component in the iterated tree
  Word parent;            // least member word of the parent component
  std::size_t cls = 0;
  std::vector<std::vector<Word>> pools;  // least member words of the pooled components
  std::vector<Word> targets;             // image of the pool's member under σ
};

struct SigmaMap {
  unsigned order = 1;          // σ lives on the tree over levels 0, order, 2*order, ...
  std::size_t maps = 0;
  std::uint64_t alphabet = 0;  // maps^order
  std::size_t depth = 0;       // iterated levels covered
  std::vector<std::vector<std::uint64_t>> levels;
  std::vector<PoolRecord> pools;

  Word apply(const Word& w) const {
    if (w.size() % order) throw PreconditionError("sigma: word length not a multiple of the order");
    const std::size_t n = w.size() / order;
    if (n > depth) throw PreconditionError("sigma: word beyond constructed depth");
    return index_word(levels[n][word_index(w, maps)], w.size(), maps);
  }
};

/// Builds σ to `depth` iterated levels from a certificate for A^k against m^k.
inline SigmaMap build_sigma(AugmentedTree& tree, const Classification& cls, Certificate cert, std::size_t depth) {
  if (!cls.simple()) throw PreconditionError("build_sigma: classification is not simple");
  const std::size_t r = cls.classes.size();
  const std::int64_t m = static_cast<std::int64_t>(cls.maps);
  const CountMatrix base = checked_power(cls.incidence, cert.power);
  if (!validate_certificate(cert, base, cls.sizes, cert.target) || cert.target != checked_pow(m, cert.power))
    throw PreconditionError("build_sigma: certificate does not match the classification");
  const std::int64_t widest = *std::max_element(cls.sizes.begin(), cls.sizes.end());
  unsigned raise = 1;
  while (checked_pow(cert.target, raise) < widest) ++raise;
  if (raise > 1) cert = stack_certificates(cert, base, raise);

  const unsigned k = cert.power;
  SigmaMap sigma;
  sigma.order = k;
  sigma.maps = cls.maps;
  sigma.alphabet = static_cast<std::uint64_t>(cert.target);
  sigma.depth = depth;
  if (depth * k > tree.max_level())
    throw PreconditionError("build_sigma: depth " + std::to_string(depth) + " at order " + std::to_string(k) +
                            " exceeds explored depth " + std::to_string(tree.max_level()));
  {
    long double words = 1;
    for (std::size_t n = 0; n < depth; ++n) words *= static_cast<long double>(sigma.alphabet);
    if (words > static_cast<long double>(1u << 22))
      throw CapExceeded("build_sigma: level " + std::to_string(depth) + " too large for permutation tables");
  }

  const std::uint64_t M = sigma.alphabet;
  sigma.levels.push_back({0});
  std::vector<std::size_t> current{0};
  for (std::size_t n = 0; n < depth; ++n) {
    std::vector<std::uint64_t> next(sigma.levels[n].size() * M, ~std::uint64_t{0});
    std::vector<std::size_t> following;
    for (auto id : current) {
      std::vector<std::size_t> desc{id};
      for (unsigned step = 0; step < k; ++step) {
        std::vector<std::size_t> deeper;
        for (auto d : desc) {
          const auto& kids = tree.offspring(d);
          deeper.insert(deeper.end(), kids.begin(), kids.end());
        }
        desc = std::move(deeper);
      }
      std::sort(desc.begin(), desc.end(), [&](std::size_t a, std::size_t b) {
        return tree.component(a).min_word() < tree.component(b).min_word();
      });

      const Component& parent = tree.component(id);
      const auto ci = cls.class_of_component(parent);
      if (!ci) throw PreconditionError("build_sigma: component " + word_to_string(parent.min_word()) + " has no class");
      const CountMatrix& c = cert.rows[*ci];
      if (c.rows() != parent.size()) throw PreconditionError("build_sigma: certificate row has wrong group count");

      std::vector<std::vector<std::size_t>> buckets(r);
      for (auto d : desc) {
        const auto cj = cls.class_of_component(tree.component(d));
        if (!cj) throw PreconditionError("build_sigma: descendant without class");
        buckets[*cj].push_back(d);
      }
      std::vector<std::size_t> cursor(r, 0);

      PoolRecord record;
      record.level = n;
      record.parent = parent.min_word();
      record.cls = *ci;
      for (std::size_t s = 0; s < parent.size(); ++s) {
        std::vector<Word> pool_words;
        std::vector<Word> pooled;
        for (std::size_t j = 0; j < r; ++j)
          for (std::int64_t t = 0; t < c(s, j); ++t) {
            if (cursor[j] >= buckets[j].size())
              throw PreconditionError("build_sigma: certificate asks for more class-" + std::to_string(j + 1) +
                                      " components than exist");
            const Component& comp = tree.component(buckets[j][cursor[j]++]);
            pooled.push_back(comp.min_word());
            for (const auto& mem : comp.members) pool_words.push_back(mem.word);
          }
        if (pool_words.size() != M) throw PreconditionError("build_sigma: pool size differs from m^k");
        std::sort(pool_words.begin(), pool_words.end());
        const std::uint64_t target = sigma.levels[n][word_index(parent.members[s].word, sigma.maps)];
        for (std::uint64_t t = 0; t < M; ++t) next[word_index(pool_words[t], sigma.maps)] = target * M + t;
        record.pools.push_back(std::move(pooled));
        record.targets.push_back(index_word(target, n * k, sigma.maps));
      }
      for (std::size_t j = 0; j < r; ++j)
        if (cursor[j] != buckets[j].size()) throw PreconditionError("build_sigma: unpooled descendants remain");
      sigma.pools.push_back(std::move(record));
      following.insert(following.end(), desc.begin(), desc.end());
    }
    sigma.levels.push_back(std::move(next));
    current = std::move(following);
  }
  return sigma;
}

struct DistortionAudit {
  std::size_t depth = 0;
  unsigned order = 1;
  std::size_t bound = 0;
  std::size_t max_distortion = 0;
  std::uint64_t pairs_checked = 0;
  bool exhaustive = true;
  bool bijective = true;
  bool levels_preserved = true;
  bool root_fixed = true;
  bool level_one_identity = true;
  bool sibling_property = true;

  bool ok() const noexcept {
    return bijective && levels_preserved && root_fixed && level_one_identity && sibling_property &&
           max_distortion <= bound;
  }
};

struct AuditOptions {
  std::uint64_t max_exhaustive_words = 1500;
  std::uint64_t samples = 200'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Compares d_tree(σx, σy) with d_aug(x, y) over word pairs; bound is k + 2.
inline DistortionAudit verify_near_isometry(const SigmaMap& sigma, AugmentedTree& tree, std::size_t horizontal_bound,
                                            std::size_t depth, const AuditOptions& opt = {}) {
  if (depth > sigma.depth) throw PreconditionError("verify_near_isometry: depth beyond sigma");
  DistortionAudit audit;
  audit.depth = depth;
  audit.order = sigma.order;
  audit.bound = horizontal_bound + 2;
  const std::uint64_t M = sigma.alphabet;

  std::uint64_t size = 1;
  for (std::size_t n = 0; n <= depth; ++n) {
    const auto& table = sigma.levels[n];
    if (table.size() != size) audit.levels_preserved = false;
    std::vector<bool> hit(table.size(), false);
    for (auto v : table) {
      if (v >= table.size() || hit[v]) {
        audit.bijective = false;
        break;
      }
      hit[v] = true;
    }
    size *= M;
  }
  audit.root_fixed = sigma.levels[0] == std::vector<std::uint64_t>{0};
  if (depth >= 1)
    for (std::uint64_t i = 0; i < sigma.levels[1].size(); ++i)
      if (sigma.levels[1][i] != i) audit.level_one_identity = false;

  const std::size_t k = sigma.order;
  for (std::size_t n = 1; n <= depth; ++n)
    for (auto id : tree.components_at(n * k)) {
      const Component& c = tree.component(id);
      const Word first = sigma.apply(c.members.front().word);
      for (const auto& mem : c.members) {
        const Word img = sigma.apply(mem.word);
        if (!std::equal(first.begin(), first.end() - static_cast<std::ptrdiff_t>(k), img.begin()))
          audit.sibling_property = false;
      }
    }

  std::vector<Word> words, images;
  {
    std::uint64_t count = 1;
    for (std::size_t n = 0; n <= depth; ++n) {
      for (std::uint64_t i = 0; i < count; ++i) {
        words.push_back(index_word(i, n * k, sigma.maps));
        images.push_back(index_word(sigma.levels[n][i], n * k, sigma.maps));
      }
      count *= M;
    }
  }
  tree.explore(depth * k);

  const std::uint64_t total = words.size();
  audit.exhaustive = total <= opt.max_exhaustive_words;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  if (audit.exhaustive) {
    for (std::uint32_t i = 0; i < total; ++i)
      for (std::uint32_t j = i + 1; j < total; ++j) pairs.emplace_back(i, j);
  } else {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    for (std::uint64_t s = 0; s < opt.samples; ++s)
      pairs.emplace_back(static_cast<std::uint32_t>(pick(rng)), static_cast<std::uint32_t>(pick(rng)));
  }

  const unsigned threads = std::max(1u, opt.threads);
  std::vector<std::size_t> worst(threads, 0);
  auto work = [&](unsigned t) {
    for (std::size_t p = t; p < pairs.size(); p += threads) {
      const auto [i, j] = pairs[p];
      const std::size_t aug = tree.distance_explored(words[i], words[j], k);
      const std::size_t plain = tree_distance(images[i], images[j], k);
      worst[t] = std::max(worst[t], aug > plain ? aug - plain : plain - aug);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  audit.max_distortion = *std::max_element(worst.begin(), worst.end());
  audit.pairs_checked = pairs.size();
  return audit;
}

}  // namespace augtree
