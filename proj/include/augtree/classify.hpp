#pragma once

// Horizontal components, their signatures, and the worklist classification that
// yields the incidence matrix.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "augtree/errors.hpp"
#include "augtree/geometry.hpp"
#include "augtree/isomorphism.hpp"
#include "augtree/union_find.hpp"

namespace augtree {

using CountMatrix = Matrix<std::int64_t>;

struct Member {
  Word word;
  CellState cell;
};

/// Maximal horizontally connected set of same-level words. Members sorted by word.
struct Component {
  std::size_t level = 0;
  std::vector<Member> members;

  std::size_t size() const noexcept { return members.size(); }
  const Word& min_word() const { return members.front().word; }
  std::vector<CellState> cells() const {
    std::vector<CellState> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.cell);
    return out;
  }
};

inline Component root_component(const IfsSpec& spec) {
  return Component{0, {Member{{}, root_cell(spec)}}};
}

/// Sorted multiset of (linear part, translation - t0), t0 the least member translation.
struct Signature {
  std::vector<std::pair<IntMatrix, IntVector>> entries;

  std::size_t size() const noexcept { return entries.size(); }
  friend bool operator==(const Signature&, const Signature&) = default;
  friend bool operator<(const Signature& a, const Signature& b) { return a.entries < b.entries; }
};

inline Signature signature(const Component& component) {
  if (component.members.empty()) throw PreconditionError("signature of an empty component");
  IntVector t0 = component.members.front().cell.translation;
  for (const auto& m : component.members) t0 = std::min(t0, m.cell.translation);
  Signature sig;
  sig.entries.reserve(component.size());
  for (const auto& m : component.members)
    sig.entries.emplace_back(m.cell.linear, subtract(m.cell.translation, t0));
  std::sort(sig.entries.begin(), sig.entries.end());
  return sig;
}

/// Horizontal adjacency lists among a component's members.
inline std::vector<std::vector<std::size_t>> horizontal_graph(const Geometry& geo,
                                                              const Component& component) {
  const auto cells = component.cells();
  std::vector<std::vector<std::size_t>> adj(cells.size());
  for (auto [i, j] : geo.adjacent_pairs(cells)) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  return adj;
}

/// All-pairs BFS distances (row-major); npos where unreachable.
inline std::vector<std::size_t> graph_distances(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  std::vector<std::size_t> dist(n * n, static_cast<std::size_t>(-1));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> queue{s};
    dist[s * n + s] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const std::size_t v = queue[qi];
      for (auto u : adj[v])
        if (dist[s * n + u] == static_cast<std::size_t>(-1)) {
          dist[s * n + u] = dist[s * n + v] + 1;
          queue.push_back(u);
        }
    }
  }
  return dist;
}

inline std::size_t diameter(const Geometry& geo, const Component& component) {
  const auto dist = graph_distances(horizontal_graph(geo, component));
  std::size_t best = 0;
  for (auto d : dist)
    if (d != static_cast<std::size_t>(-1)) best = std::max(best, d);
  return best;
}

/// Splits the offspring of one component into maximal connected groups.
inline std::vector<Component> expand_component(const Geometry& geo, const Component& parent) {
  const IfsSpec& spec = geo.spec();
  std::vector<Member> kids;
  kids.reserve(parent.size() * spec.maps());
  for (const auto& m : parent.members)
    for (std::uint32_t i = 1; i <= spec.maps(); ++i) {
      Word w = m.word;
      w.push_back(i);
      kids.push_back(Member{std::move(w), child_cell(spec, m.cell, i)});
    }
  std::vector<CellState> cells;
  cells.reserve(kids.size());
  for (const auto& k : kids) cells.push_back(k.cell);

  DisjointSets sets(kids.size());
  for (auto [i, j] : geo.adjacent_pairs(cells)) sets.unite(i, j);

  // Kids are generated in word order, so groups() already yields canonical order.
  std::vector<Component> out;
  for (const auto& group : sets.groups()) {
    if (group.size() > spec.caps.max_component_size)
      throw CapExceeded("component of size " + std::to_string(group.size()) + " at level " +
                        std::to_string(parent.level + 1) + " exceeds max_component_size " +
                        std::to_string(spec.caps.max_component_size));
    Component c{parent.level + 1, {}};
    for (auto idx : group) c.members.push_back(kids[idx]);
    out.push_back(std::move(c));
  }
  return out;
}

enum class ClassificationVerdict { simple, not_simple_up_to_depth, cap_exceeded };

inline const char* to_string(ClassificationVerdict v) {
  switch (v) {
    case ClassificationVerdict::simple: return "simple";
    case ClassificationVerdict::not_simple_up_to_depth: return "not-simple-up-to-depth";
    case ClassificationVerdict::cap_exceeded: return "cap-exceeded";
  }
  return "?";
}

struct ConnectedClass {
  Signature signature;
  Component representative;
  std::vector<std::int64_t> offspring;  // counts per class; empty if never expanded
  std::vector<std::size_t> merged_from;  // signature-class indices folded into this one
  std::size_t diameter = 0;
  bool expanded = false;

  std::size_t size() const noexcept { return representative.size(); }
};

struct Classification {
  ClassificationVerdict verdict = ClassificationVerdict::simple;
  std::vector<ConnectedClass> classes;
  CountMatrix incidence;
  std::vector<std::int64_t> sizes;
  std::size_t maps = 0;
  std::size_t max_component_size = 0;
  std::size_t horizontal_bound = 0;  // max diameter over representatives
  std::size_t depth_reached = 0;     // deepest representative level
  std::map<Signature, std::size_t> class_of;
  std::vector<std::string> notes;
  bool merged = false;
  std::size_t validated_depth = 0;

  std::optional<std::size_t> class_index(const Signature& sig) const {
    auto it = class_of.find(sig);
    if (it == class_of.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> class_of_component(const Component& c) const {
    return class_index(signature(c));
  }
  bool simple() const noexcept { return verdict == ClassificationVerdict::simple; }
};

namespace detail {

inline void finalize(Classification& cls) {
  const std::size_t r = cls.classes.size();
  cls.incidence = CountMatrix(r, r);
  cls.sizes.assign(r, 0);
  cls.max_component_size = 0;
  cls.horizontal_bound = 0;
  cls.depth_reached = 0;
  for (std::size_t i = 0; i < r; ++i) {
    auto& c = cls.classes[i];
    if (c.expanded) c.offspring.resize(r, 0);
    for (std::size_t j = 0; j < c.offspring.size(); ++j) cls.incidence(i, j) = c.offspring[j];
    cls.sizes[i] = static_cast<std::int64_t>(c.size());
    cls.max_component_size = std::max(cls.max_component_size, c.size());
    cls.horizontal_bound = std::max(cls.horizontal_bound, c.diameter);
    cls.depth_reached = std::max(cls.depth_reached, c.representative.level);
  }
}

}  // namespace detail

/// Worklist over signatures from the root. Closure means the tree is simple.
inline Classification classify(const Geometry& geo) {
  const IfsSpec& spec = geo.spec();
  Classification cls;
  cls.maps = spec.maps();

  auto add_class = [&](const Component& c) {
    ConnectedClass k;
    k.signature = signature(c);
    k.representative = c;
    k.diameter = diameter(geo, c);
    k.merged_from = {cls.classes.size()};
    cls.class_of.emplace(k.signature, cls.classes.size());
    cls.classes.push_back(std::move(k));
    return cls.classes.size() - 1;
  };

  std::deque<std::size_t> work{add_class(root_component(spec))};
  while (!work.empty()) {
    const std::size_t i = work.front();
    work.pop_front();
    const Component rep = cls.classes[i].representative;
    if (rep.level >= spec.caps.max_depth) {
      cls.verdict = ClassificationVerdict::not_simple_up_to_depth;
      cls.notes.push_back("unexpanded class at level " + std::to_string(rep.level) +
                          " (max_depth " + std::to_string(spec.caps.max_depth) + ")");
      break;
    }
    std::vector<Component> kids;
    try {
      kids = expand_component(geo, rep);
    } catch (const CapExceeded& e) {
      cls.verdict = ClassificationVerdict::cap_exceeded;
      cls.notes.push_back(e.what());
      break;
    }
    std::vector<std::int64_t> row(cls.classes.size(), 0);
    bool capped = false;
    for (const auto& kid : kids) {
      const Signature sig = signature(kid);
      std::size_t j;
      if (auto it = cls.class_of.find(sig); it != cls.class_of.end()) {
        j = it->second;
      } else {
        if (cls.classes.size() >= spec.caps.max_classes) {
          capped = true;
          break;
        }
        j = add_class(kid);
        work.push_back(j);
      }
      if (row.size() <= j) row.resize(j + 1, 0);
      ++row[j];
    }
    if (capped) {
      cls.verdict = ClassificationVerdict::cap_exceeded;
      cls.notes.push_back("class count exceeds max_classes " + std::to_string(spec.caps.max_classes));
      break;
    }
    cls.classes[i].offspring = std::move(row);
    cls.classes[i].expanded = true;
  }
  detail::finalize(cls);
  return cls;
}

/// Two-level graph T ∪ TΣ: parents colored 0, children 1; edge type 1 vertical, 2 horizontal.
inline ColoredGraph two_level_graph(const Geometry& geo, const Component& parent) {
  const auto kids = expand_component(geo, parent);
  std::vector<Member> all;
  for (const auto& k : kids)
    for (const auto& m : k.members) all.push_back(m);
  std::sort(all.begin(), all.end(), [](const Member& a, const Member& b) { return a.word < b.word; });
  const std::size_t p = parent.size();
  ColoredGraph g(p + all.size());
  for (std::size_t v = p; v < g.size(); ++v) g.color[v] = 1;
  for (auto [i, j] : geo.adjacent_pairs(parent.cells())) g.connect(i, j, 2);
  std::vector<CellState> kid_cells;
  for (const auto& m : all) kid_cells.push_back(m.cell);
  for (auto [i, j] : geo.adjacent_pairs(kid_cells)) g.connect(p + i, p + j, 2);
  for (std::size_t c = 0; c < all.size(); ++c) {
    const Word prefix(all[c].word.begin(), all[c].word.end() - 1);
    for (std::size_t i = 0; i < p; ++i)
      if (parent.members[i].word == prefix) g.connect(i, p + c, 1);
  }
  return g;
}

/// Folds signature classes with isomorphic two-level graphs. Merges whose members
/// disagree on offspring rows (at the representative or at any component up to
/// `validation_depth`) are undone, leaving the finer classes.
inline Classification merge_isomorphic(const Geometry& geo, const Classification& base,
                                       std::size_t validation_depth = 4) {
  if (!base.simple()) {
    Classification out = base;
    out.notes.push_back("isomorphism merging skipped: classification is not closed");
    return out;
  }
  const std::size_t r = base.classes.size();
  std::vector<ColoredGraph> graphs;
  graphs.reserve(r);
  for (const auto& c : base.classes) graphs.push_back(two_level_graph(geo, c.representative));

  std::vector<std::string> notes = base.notes;
  DisjointSets sets(r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) {
      if (base.classes[i].size() != base.classes[j].size() || sets.connected(i, j)) continue;
      const IsoResult res = isomorphic(graphs[i], graphs[j]);
      if (res == IsoResult::isomorphic) sets.unite(i, j);
      if (res == IsoResult::budget_exhausted)
        notes.push_back("isomorphism search budget exhausted for classes " + std::to_string(i + 1) +
                        " and " + std::to_string(j + 1) + "; kept apart");
    }
  std::vector<std::vector<std::size_t>> groups = sets.groups();

  // Components observed to validation depth, as (signature-class, offspring signature-class list).
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> observed;
  {
    std::vector<Component> level{root_component(geo.spec())};
    for (std::size_t n = 0; n < validation_depth && !level.empty(); ++n) {
      std::vector<Component> next;
      for (const auto& c : level) {
        auto kids = expand_component(geo, c);
        std::vector<std::size_t> kid_classes;
        for (const auto& k : kids) kid_classes.push_back(base.class_of.at(signature(k)));
        observed.emplace_back(base.class_of.at(signature(c)), std::move(kid_classes));
        for (auto& k : kids) next.push_back(std::move(k));
      }
      level = std::move(next);
    }
  }

  while (true) {
    std::vector<std::size_t> group_of(r);
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (auto i : groups[g]) group_of[i] = g;
    auto merged_row = [&](const std::vector<std::size_t>& kid_classes) {
      std::vector<std::int64_t> row(groups.size(), 0);
      for (auto j : kid_classes) ++row[group_of[j]];
      return row;
    };
    std::vector<std::optional<std::vector<std::int64_t>>> seen(groups.size());
    std::vector<bool> broken(groups.size(), false);
    auto check = [&](std::size_t cls_index, const std::vector<std::int64_t>& row) {
      const std::size_t g = group_of[cls_index];
      if (!seen[g]) seen[g] = row;
      else if (*seen[g] != row) broken[g] = true;
    };
    for (std::size_t i = 0; i < r; ++i) {
      std::vector<std::size_t> kid_classes;
      for (std::size_t j = 0; j < r; ++j)
        for (std::int64_t c = 0; c < base.classes[i].offspring[j]; ++c) kid_classes.push_back(j);
      check(i, merged_row(kid_classes));
    }
    for (const auto& [ci, kids] : observed) check(ci, merged_row(kids));

    bool changed = false;
    std::vector<std::vector<std::size_t>> next;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (broken[g] && groups[g].size() > 1) {
        std::string names;
        for (auto i : groups[g]) names += (names.empty() ? "" : ",") + std::to_string(i + 1);
        notes.push_back("merge of classes {" + names + "} refused: offspring rows disagree");
        for (auto i : groups[g]) next.push_back({i});
        changed = true;
      } else {
        next.push_back(groups[g]);
      }
    }
    std::sort(next.begin(), next.end());
    groups = std::move(next);
    if (!changed) break;
  }

  Classification out;
  out.verdict = base.verdict;
  out.maps = base.maps;
  out.merged = true;
  out.validated_depth = validation_depth;
  out.notes = std::move(notes);
  std::vector<std::size_t> group_of(r);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (auto i : groups[g]) group_of[i] = g;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& head = base.classes[groups[g].front()];
    ConnectedClass k;
    k.signature = head.signature;
    k.representative = head.representative;
    k.expanded = true;
    k.merged_from = groups[g];
    k.offspring.assign(groups.size(), 0);
    for (std::size_t j = 0; j < r; ++j) k.offspring[group_of[j]] += head.offspring[j];
    for (auto i : groups[g]) {
      k.diameter = std::max(k.diameter, base.classes[i].diameter);
      out.class_of.emplace(base.classes[i].signature, g);
    }
    out.classes.push_back(std::move(k));
  }
  detail::finalize(out);
  return out;
}

}  // namespace augtree
