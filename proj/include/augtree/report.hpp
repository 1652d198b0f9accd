#pragma once

// End-to-end analysis of one IFS, comparison of two, and their JSON / text forms.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "augtree/boundary.hpp"
#include "augtree/classify.hpp"
#include "augtree/incidence.hpp"
#include "augtree/rearrange.hpp"
#include "augtree/sigma.hpp"
#include "augtree/tree_metric.hpp"

namespace augtree {

struct Options {
  std::optional<std::size_t> max_depth;
  unsigned k_max = 6;
  bool merge_isomorphic = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool timing = false;
  std::size_t sigma_depth = 4;
  std::size_t holder_depth = 6;
  std::size_t holder_pairs = 200;
  std::size_t delta_depth = 4;
  std::size_t node_budget = 5'000'000;
};

enum class Verdict { dust_like, equivalent_to_dust_like, unknown, not_simple_up_to_depth, cap_exceeded };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::dust_like: return "DUST_LIKE";
    case Verdict::equivalent_to_dust_like: return "EQUIVALENT_TO_DUST_LIKE";
    case Verdict::unknown: return "UNKNOWN";
    case Verdict::not_simple_up_to_depth: return "NOT_SIMPLE_UP_TO_DEPTH";
    case Verdict::cap_exceeded: return "CAP_EXCEEDED";
  }
  return "?";
}

struct SigmaSummary {
  bool constructed = false;
  std::string reason;
  unsigned order = 0;
  std::size_t depth = 0;
  DistortionAudit audit;
};

struct Report {
  IfsSpec spec;
  std::optional<NeighborSet> neighbors;
  Classification classification;
  std::optional<IncidenceAnalysis> analysis;
  std::optional<PowerOutcome> rearrangement;
  SigmaSummary sigma;
  std::optional<BoundarySample> holder;
  std::optional<DeltaEstimate> delta;
  Verdict verdict = Verdict::unknown;
  std::string verdict_text;
  std::vector<std::string> obstructions;
  std::vector<std::string> notes;
  std::uint64_t seed = 1;
  std::vector<std::pair<std::string, double>> timing_ms;
  bool timing = false;
};

namespace detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Largest depth <= wanted whose word count stays manageable.
inline std::size_t sigma_depth_for(std::uint64_t alphabet, std::size_t wanted, std::size_t levels_available) {
  std::size_t depth = 0;
  long double total = 1, level = 1;
  while (depth < wanted && depth + 1 <= levels_available) {
    level *= static_cast<long double>(alphabet);
    if (total + level > 20000) break;
    total += level;
    ++depth;
  }
  return depth;
}

}  // namespace detail

inline Report run_analyze(IfsSpec spec, const Options& opt = {}) {
  if (opt.max_depth) spec.caps.max_depth = *opt.max_depth;
  Report rep;
  rep.seed = opt.seed;
  rep.timing = opt.timing;
  detail::Stopwatch clock;
  const Geometry geo(spec);
  rep.spec = geo.spec();
  rep.neighbors = geo.neighbors();
  if (rep.neighbors && rep.neighbors->provenance == NeighborProvenance::user_supplied)
    rep.notes.push_back("neighbor set supplied by the user and trusted (checked for symmetry only)");

  rep.classification = classify(geo);
  if (opt.merge_isomorphic) rep.classification = merge_isomorphic(geo, rep.classification);
  rep.timing_ms.emplace_back("classify", clock.lap());
  const Classification& cls = rep.classification;
  const auto m = static_cast<std::int64_t>(spec.maps());

  if (!spec.is_similarity())
    rep.notes.push_back("maps are affine but not similitudes in the working basis: tree-level results only; "
                        "the geometric Lipschitz statement needs the weighted ultrametric, which is not computed");

  if (cls.verdict == ClassificationVerdict::not_simple_up_to_depth) {
    rep.verdict = Verdict::not_simple_up_to_depth;
    rep.verdict_text = "no closure of connected classes up to depth " + std::to_string(spec.caps.max_depth);
  } else if (cls.verdict == ClassificationVerdict::cap_exceeded) {
    rep.verdict = Verdict::cap_exceeded;
    rep.verdict_text = "analysis cap exceeded; simplicity undecided";
  }
  if (!cls.simple()) {
    rep.sigma.reason = "near-isometry not constructed: classification is not simple";
  } else {
    rep.notes.push_back("horizontal components are bounded, so the attractor is totally disconnected");
    rep.analysis = analyze_matrix(cls.incidence, cls.sizes, m);
    if (!rep.analysis->primitive()) rep.obstructions.push_back("incidence matrix is not primitive");
    if (!rep.analysis->eigen_ok) rep.obstructions.push_back("A b != m b");
    if (rep.analysis->eigen_ok) {
      rep.rearrangement = rearrange_power(cls.incidence, cls.sizes, m, opt.k_max, opt.node_budget);
      if (!rep.rearrangement->certificate) {
        for (const auto& at : rep.rearrangement->attempts) {
          if (at.overflow) {
            rep.obstructions.push_back("power " + std::to_string(at.power) + " overflows 64-bit counts");
            continue;
          }
          for (std::size_t i = 0; i < at.rows.size(); ++i)
            if (at.rows[i] != RowStatus::certified)
              rep.obstructions.push_back("row " + std::to_string(i + 1) + " of A^" + std::to_string(at.power) +
                                         " not (" + std::to_string(at.target) + ", b)-rearrangeable: " +
                                         to_string(at.rows[i]));
        }
      }
    }
    rep.timing_ms.emplace_back("rearrange", clock.lap());

    if (cls.max_component_size == 1) {
      rep.verdict = Verdict::dust_like;
      rep.verdict_text = "no horizontal edges: the pieces are pairwise disjoint (dust-like)";
    } else if (rep.rearrangement && rep.rearrangement->certificate) {
      rep.verdict = Verdict::equivalent_to_dust_like;
      rep.verdict_text = "simple augmented tree with a rearrangeable incidence matrix power: Lipschitz "
                         "equivalent to a dust-like set with the same number of maps and ratio";
    } else {
      rep.verdict = Verdict::unknown;
      rep.verdict_text = "simple augmented tree without a rearrangement certificate up to k = " +
                         std::to_string(opt.k_max) + "; equivalence to a dust-like set undecided";
    }

    const std::size_t levels = std::max(spec.caps.max_depth, opt.holder_depth + 3);
    AugmentedTree tree(geo, levels);
    if (rep.rearrangement && rep.rearrangement->certificate) {
      const Certificate& cert = *rep.rearrangement->certificate;
      std::uint64_t alphabet = static_cast<std::uint64_t>(cert.target);
      const std::int64_t widest = *std::max_element(cls.sizes.begin(), cls.sizes.end());
      unsigned order = cert.power;
      while (static_cast<std::int64_t>(alphabet) < widest) {
        alphabet *= static_cast<std::uint64_t>(cert.target);
        order += cert.power;
      }
      const std::size_t depth = detail::sigma_depth_for(alphabet, opt.sigma_depth, levels / order);
      if (depth == 0) {
        rep.sigma.reason = "iterated alphabet too large for a table";
      } else {
        const SigmaMap sigma = build_sigma(tree, cls, cert, depth);
        AuditOptions ao;
        ao.seed = opt.seed;
        ao.threads = opt.threads;
        rep.sigma.constructed = true;
        rep.sigma.order = sigma.order;
        rep.sigma.depth = depth;
        rep.sigma.audit = verify_near_isometry(sigma, tree, cls.horizontal_bound, depth, ao);
        if (!rep.sigma.audit.ok()) rep.notes.push_back("near-isometry audit FAILED");
      }
    } else {
      rep.sigma.reason = "near-isometry not constructed: no rearrangement certificate";
    }
    rep.timing_ms.emplace_back("sigma", clock.lap());

    const double a = spec.a_param();
    rep.holder = holder_sample(tree, opt.holder_depth, opt.holder_pairs, a, opt.seed);
    rep.delta = hyperbolicity_delta_sample(tree, opt.delta_depth, 400, 20'000, opt.seed);
    const double a_prime = std::exp(static_cast<double>(rep.delta->delta) * a) - 1.0;
    if (a_prime < std::sqrt(2.0) - 1.0)
      rep.notes.push_back("sampled delta satisfies exp(delta a) - 1 < sqrt(2) - 1 for the chosen a");
    else
      rep.notes.push_back("sampled delta does not satisfy exp(delta a) - 1 < sqrt(2) - 1 for the chosen a; "
                          "the visual metric is then only a quasi-metric");
    rep.timing_ms.emplace_back("boundary", clock.lap());
  }
  return rep;
}

namespace detail {

inline nlohmann::json counts_json(const CountMatrix& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) arr.push_back(m.row(r));
  return arr;
}

inline nlohmann::json words_json(const std::vector<Word>& ws) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& w : ws) arr.push_back(word_to_string(w));
  return arr;
}

inline nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json neighbors_json(const NeighborSet& n) {
  nlohmann::json vecs = nlohmann::json::array();
  for (const auto& v : n.vectors) vecs.push_back(detail::to_json(v));
  return {{"provenance", to_string(n.provenance)}, {"vectors", vecs}};
}

inline nlohmann::json classification_json(const Classification& cls) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t i = 0; i < cls.classes.size(); ++i) {
    const auto& c = cls.classes[i];
    std::vector<Word> members;
    for (const auto& mem : c.representative.members) members.push_back(mem.word);
    nlohmann::json sig = nlohmann::json::array();
    for (const auto& [g, t] : c.signature.entries)
      sig.push_back({{"linear", detail::to_json(g)}, {"offset", detail::to_json(t)}});
    nlohmann::json from = nlohmann::json::array();
    for (auto f : c.merged_from) from.push_back(f + 1);
    classes.push_back({{"index", i + 1},
                       {"size", c.size()},
                       {"level", c.representative.level},
                       {"representative", detail::words_json(members)},
                       {"signature", sig},
                       {"diameter", c.diameter},
                       {"expanded", c.expanded},
                       {"merged_from", from}});
  }
  return {{"verdict", to_string(cls.verdict)},
          {"merged", cls.merged},
          {"validated_depth", cls.validated_depth},
          {"classes", classes},
          {"incidence", detail::counts_json(cls.incidence)},
          {"b", cls.sizes},
          {"m", cls.maps},
          {"max_component_size", cls.max_component_size},
          {"horizontal_bound", cls.horizontal_bound},
          {"depth_reached", cls.depth_reached},
          {"totally_disconnected", cls.simple()},
          {"notes", cls.notes}};
}

inline nlohmann::json certificate_json(const Certificate& cert) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : cert.rows) rows.push_back(detail::counts_json(c));
  return {{"power", cert.power}, {"target", cert.target}, {"rows", rows}};
}

inline nlohmann::json to_json(const Report& rep) {
  nlohmann::json j;
  j["spec"] = to_json(rep.spec);
  j["neighbors"] = rep.neighbors ? neighbors_json(*rep.neighbors) : nlohmann::json(nullptr);
  j["classification"] = classification_json(rep.classification);
  if (rep.analysis) {
    j["incidence_analysis"] = {{"eigen_ok", rep.analysis->eigen_ok},
                               {"irreducible", rep.analysis->irreducible},
                               {"primitive", rep.analysis->primitive()},
                               {"primitivity_witness", rep.analysis->primitivity_witness
                                                           ? nlohmann::json(*rep.analysis->primitivity_witness)
                                                           : nlohmann::json(nullptr)}};
  } else {
    j["incidence_analysis"] = nullptr;
  }
  if (rep.rearrangement) {
    nlohmann::json attempts = nlohmann::json::array();
    for (const auto& at : rep.rearrangement->attempts) {
      nlohmann::json rows = nlohmann::json::array();
      for (auto s : at.rows) rows.push_back(to_string(s));
      attempts.push_back({{"power", at.power}, {"target", at.target}, {"rows", rows}, {"overflow", at.overflow}});
    }
    j["rearrangement"] = {{"attempts", attempts},
                          {"certificate", rep.rearrangement->certificate
                                              ? certificate_json(*rep.rearrangement->certificate)
                                              : nlohmann::json(nullptr)}};
  } else {
    j["rearrangement"] = nullptr;
  }
  nlohmann::json sigma = {{"constructed", rep.sigma.constructed}};
  if (rep.sigma.constructed) {
    const auto& a = rep.sigma.audit;
    sigma["order"] = rep.sigma.order;
    sigma["depth"] = rep.sigma.depth;
    sigma["audit"] = {{"bound", a.bound},
                      {"max_distortion", a.max_distortion},
                      {"pairs_checked", a.pairs_checked},
                      {"exhaustive", a.exhaustive},
                      {"bijective", a.bijective},
                      {"levels_preserved", a.levels_preserved},
                      {"root_fixed", a.root_fixed},
                      {"level_one_identity", a.level_one_identity},
                      {"sibling_property", a.sibling_property},
                      {"ok", a.ok()}};
  } else {
    sigma["reason"] = rep.sigma.reason;
  }
  j["sigma"] = sigma;
  if (rep.holder && rep.delta) {
    nlohmann::json windows = nlohmann::json::array();
    for (const auto& w : rep.holder->windows)
      windows.push_back({{"depth", w.depth},
                         {"pairs", w.pairs},
                         {"coincident", w.coincident},
                         {"min_ratio", detail::finite_or_null(w.min_ratio)},
                         {"max_ratio", detail::finite_or_null(w.max_ratio)},
                         {"spread", detail::finite_or_null(w.spread)}});
    j["boundary"] = {{"a", rep.holder->a},
                     {"alpha", rep.holder->alpha},
                     {"windows", windows},
                     {"window_factor", detail::finite_or_null(rep.holder->window_factor)},
                     {"delta", {{"depth", rep.delta->depth},
                                {"exhaustive", rep.delta->exhaustive},
                                {"triples", rep.delta->triples},
                                {"value", to_string(rep.delta->delta)}}}};
  } else {
    j["boundary"] = nullptr;
  }
  j["verdict"] = to_string(rep.verdict);
  j["verdict_text"] = rep.verdict_text;
  j["obstructions"] = rep.obstructions;
  j["notes"] = rep.notes;
  j["seed"] = rep.seed;
  if (rep.timing) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [k, v] : rep.timing_ms) t[k] = v;
    j["timing_ms"] = t;
  }
  return j;
}

inline std::string matrix_text(const CountMatrix& m) {
  std::ostringstream out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << "  [";
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
    out << "]\n";
  }
  return out.str();
}

inline std::string to_text(const Report& rep) {
  std::ostringstream out;
  const auto& cls = rep.classification;
  out << "spec: " << (rep.spec.name.empty() ? "(unnamed)" : rep.spec.name) << "  d=" << rep.spec.dimension
      << "  m=" << rep.spec.maps() << "  |det B|=" << rep.spec.det_abs() << "\n";
  if (rep.neighbors) {
    out << "neighbors (" << to_string(rep.neighbors->provenance) << "):";
    for (const auto& v : rep.neighbors->vectors) {
      out << " (";
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
      out << ")";
    }
    out << "\n";
  }
  out << "classification: " << to_string(cls.verdict) << ", " << cls.classes.size() << " classes"
      << (cls.merged ? " (after isomorphism merging)" : "") << "\n";
  out << "b = [";
  for (std::size_t i = 0; i < cls.sizes.size(); ++i) out << (i ? " " : "") << cls.sizes[i];
  out << "]\nA =\n" << matrix_text(cls.incidence);
  out << "max component size " << cls.max_component_size << ", horizontal bound " << cls.horizontal_bound << "\n";
  if (rep.analysis) {
    out << "A b = m b: " << (rep.analysis->eigen_ok ? "yes" : "no") << ", irreducible: "
        << (rep.analysis->irreducible ? "yes" : "no") << ", primitive: ";
    if (rep.analysis->primitivity_witness)
      out << "yes (A^" << *rep.analysis->primitivity_witness << " > 0)\n";
    else
      out << "no\n";
  }
  if (rep.rearrangement && rep.rearrangement->certificate)
    out << "rearrangeable: A^" << rep.rearrangement->certificate->power << " against "
        << rep.rearrangement->certificate->target << "\n";
  if (rep.sigma.constructed)
    out << "near-isometry: order " << rep.sigma.order << ", depth " << rep.sigma.depth << ", max distortion "
        << rep.sigma.audit.max_distortion << " (bound " << rep.sigma.audit.bound << ")"
        << (rep.sigma.audit.ok() ? "" : "  AUDIT FAILED") << "\n";
  else if (!rep.sigma.reason.empty())
    out << rep.sigma.reason << "\n";
  if (rep.holder)
    out << "boundary: alpha " << rep.holder->alpha << ", spread " << rep.holder->windows[0].spread << " / "
        << rep.holder->windows[1].spread << ", delta " << to_string(rep.delta->delta) << "\n";
  for (const auto& o : rep.obstructions) out << "obstruction: " << o << "\n";
  for (const auto& n : rep.notes) out << "note: " << n << "\n";
  out << "verdict: " << to_string(rep.verdict) << "\n  " << rep.verdict_text << "\n";
  return out.str();
}

struct Comparison {
  std::string verdict;  // EQUIVALENT, UNDETERMINED or NOT_APPLICABLE
  std::string text;
  std::vector<std::string> reasons;
  Verdict left = Verdict::unknown;
  Verdict right = Verdict::unknown;
  std::vector<std::string> left_obstructions, right_obstructions;
  bool self_affine = false;
};

inline Comparison run_compare(const IfsSpec& a, const IfsSpec& b, const Options& opt = {}) {
  Comparison cmp;
  if (a.maps() != b.maps()) cmp.reasons.push_back("different numbers of maps");
  if (a.dimension != b.dimension) cmp.reasons.push_back("different dimensions");
  if (a.det_abs() != b.det_abs()) cmp.reasons.push_back("different |det B| (contraction ratios differ)");
  if (!cmp.reasons.empty()) {
    cmp.verdict = "NOT_APPLICABLE";
    cmp.text = "hypotheses fail: the comparison needs equal m and equal contraction ratio";
    return cmp;
  }
  const Report ra = run_analyze(a, opt), rb = run_analyze(b, opt);
  cmp.left = ra.verdict;
  cmp.right = rb.verdict;
  cmp.left_obstructions = ra.obstructions;
  cmp.right_obstructions = rb.obstructions;
  auto good = [](Verdict v) { return v == Verdict::dust_like || v == Verdict::equivalent_to_dust_like; };
  cmp.self_affine = !a.is_similarity() || !b.is_similarity();
  if (good(ra.verdict) && good(rb.verdict)) {
    cmp.verdict = "EQUIVALENT";
    cmp.text = "K ≃ K′: both are equivalent to the dust-like set with the same m and ratio";
    if (cmp.self_affine)
      cmp.reasons.push_back("self-affine input: the conclusion holds in the weighted ultrametric, not "
                            "the Euclidean metric");
  } else {
    cmp.verdict = "UNDETERMINED";
    cmp.text = "undetermined: at least one side lacks a dust-like equivalence";
    if (!good(ra.verdict)) cmp.reasons.push_back(std::string("left verdict ") + to_string(ra.verdict));
    if (!good(rb.verdict)) cmp.reasons.push_back(std::string("right verdict ") + to_string(rb.verdict));
  }
  return cmp;
}

inline nlohmann::json to_json(const Comparison& cmp) {
  nlohmann::json j = {{"verdict", cmp.verdict}, {"text", cmp.text}, {"reasons", cmp.reasons},
                      {"self_affine", cmp.self_affine}, {"left", nullptr}, {"right", nullptr}};
  if (cmp.verdict != "NOT_APPLICABLE") {
    j["left"] = {{"verdict", to_string(cmp.left)}, {"obstructions", cmp.left_obstructions}};
    j["right"] = {{"verdict", to_string(cmp.right)}, {"obstructions", cmp.right_obstructions}};
  }
  return j;
}

}  // namespace augtree
