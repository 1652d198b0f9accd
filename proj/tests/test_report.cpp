#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace augtree;

namespace {

Options quick() {
  Options opt;
  opt.holder_pairs = 50;
  opt.delta_depth = 3;
  return opt;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Report, VerdictsOfFixtures) {
  const std::vector<std::pair<std::string, Verdict>> expected{
      {"dust_024.json", Verdict::dust_like},
      {"dust_four.json", Verdict::dust_like},
      {"tile_024.json", Verdict::dust_like},
      {"touching_034.json", Verdict::equivalent_to_dust_like},
      {"overlapping_plane.json", Verdict::equivalent_to_dust_like},
      {"tile_034.json", Verdict::equivalent_to_dust_like},
      {"gosper_lattice.json", Verdict::equivalent_to_dust_like},
      {"reflected_044.json", Verdict::unknown},
      {"full_interval.json", Verdict::not_simple_up_to_depth}};
  for (const auto& [name, verdict] : expected) {
    const Report rep = run_analyze(oracle::load(name), quick());
    EXPECT_EQ(rep.verdict, verdict) << name;
    EXPECT_FALSE(rep.verdict_text.empty());
    if (rep.sigma.constructed) {
      EXPECT_TRUE(rep.sigma.audit.ok()) << name;
    } else {
      EXPECT_FALSE(rep.sigma.reason.empty()) << name;
    }
  }
}

TEST(Report, UnknownVerdictListsObstructions) {
  const Report rep = run_analyze(oracle::load("reflected_044.json"), quick());
  ASSERT_TRUE(rep.analysis);
  EXPECT_FALSE(rep.analysis->primitive());
  EXPECT_EQ(rep.obstructions.front(), "incidence matrix is not primitive");
  EXPECT_EQ(rep.obstructions.size(), 1u + 6u);
  EXPECT_NE(rep.obstructions[1].find("no-partition"), std::string::npos);
  EXPECT_FALSE(rep.sigma.constructed);
}

TEST(Report, NotSimpleSkipsLaterStages) {
  const Report rep = run_analyze(oracle::load("full_interval.json"), quick());
  EXPECT_FALSE(rep.analysis);
  EXPECT_FALSE(rep.rearrangement);
  EXPECT_FALSE(rep.holder);
  const auto j = to_json(rep);
  EXPECT_TRUE(j["boundary"].is_null());
  EXPECT_EQ(j["verdict"], "NOT_SIMPLE_UP_TO_DEPTH");
}

TEST(Report, CapOnClassesGivesCapVerdict) {
  auto spec = oracle::load("gosper_lattice.json");
  spec.caps.max_classes = 3;
  EXPECT_EQ(run_analyze(spec, quick()).verdict, Verdict::cap_exceeded);
}

TEST(Report, MergeOptionShrinksOverlappingPlane) {
  Options opt = quick();
  opt.merge_isomorphic = true;
  const Report rep = run_analyze(oracle::load("overlapping_plane.json"), opt);
  EXPECT_EQ(rep.classification.incidence, (CountMatrix{{1, 2}, {2, 4}}));
  EXPECT_EQ(rep.verdict, Verdict::equivalent_to_dust_like);
  EXPECT_TRUE(to_json(rep)["classification"]["merged"].get<bool>());
}

TEST(Report, DepthOverrideIsMonotone) {
  // A configuration that closes at some depth stays closed when more depth is allowed.
  for (const char* name : {"touching_034.json", "tile_034.json", "gosper_lattice.json"}) {
    Verdict previous = Verdict::not_simple_up_to_depth;
    for (std::size_t depth = 1; depth <= 6; ++depth) {
      Options opt = quick();
      opt.max_depth = depth;
      opt.holder_depth = 2;
      opt.delta_depth = 2;
      const Report rep = run_analyze(oracle::load(name), opt);
      if (previous != Verdict::not_simple_up_to_depth) {
        EXPECT_EQ(rep.verdict, previous) << name << " " << depth;
      }
      previous = rep.verdict;
    }
    EXPECT_EQ(previous, Verdict::equivalent_to_dust_like) << name;
  }
}

TEST(Report, JsonIsDeterministicAndTimingIsOptIn) {
  const auto spec = oracle::load("touching_034.json");
  const std::string a = to_json(run_analyze(spec, quick())).dump(2);
  const std::string b = to_json(run_analyze(spec, quick())).dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("timing_ms"), std::string::npos);
  Options timed = quick();
  timed.timing = true;
  EXPECT_TRUE(to_json(run_analyze(spec, timed)).contains("timing_ms"));

  Options threaded = quick();
  threaded.threads = 3;
  EXPECT_EQ(to_json(run_analyze(spec, threaded)).dump(2), a);
}

TEST(Report, SeedChangesOnlySampledFields) {
  const auto spec = oracle::load("touching_034.json");
  Options other = quick();
  other.seed = 17;
  auto a = to_json(run_analyze(spec, quick())), b = to_json(run_analyze(spec, other));
  EXPECT_EQ(a["classification"], b["classification"]);
  EXPECT_EQ(a["rearrangement"], b["rearrangement"]);
  EXPECT_EQ(a["verdict"], b["verdict"]);
  EXPECT_NE(a["boundary"]["windows"], b["boundary"]["windows"]);
}

TEST(Report, TextMentionsVerdictAndMatrix) {
  const std::string text = to_text(run_analyze(oracle::load("touching_034.json"), quick()));
  EXPECT_NE(text.find("EQUIVALENT_TO_DUST_LIKE"), std::string::npos);
  EXPECT_NE(text.find(matrix_text(CountMatrix{{1, 1, 0}, {1, 1, 1}, {1, 1, 2}})), std::string::npos);
}

TEST(Report, SelfAffineInputIsFlagged) {
  const Report rep = run_analyze(oracle::load("tile_034.json"), quick());
  bool flagged = false;
  for (const auto& n : rep.notes) flagged = flagged || n.find("not similitudes") != std::string::npos;
  EXPECT_TRUE(flagged);
  const Report plain = run_analyze(oracle::load("touching_034.json"), quick());
  for (const auto& n : plain.notes) EXPECT_EQ(n.find("not similitudes"), std::string::npos);
}

TEST(Compare, Outcomes) {
  const auto touching = oracle::load("touching_034.json"), dust = oracle::load("dust_024.json");
  const auto eq = run_compare(touching, dust, quick());
  EXPECT_EQ(eq.verdict, "EQUIVALENT");
  EXPECT_FALSE(eq.self_affine);
  EXPECT_TRUE(eq.reasons.empty());

  const auto und = run_compare(touching, oracle::load("reflected_044.json"), quick());
  EXPECT_EQ(und.verdict, "UNDETERMINED");
  EXPECT_EQ(und.right, Verdict::unknown);
  EXPECT_FALSE(und.right_obstructions.empty());

  const auto na = run_compare(touching, oracle::load("dust_four.json"), quick());
  EXPECT_EQ(na.verdict, "NOT_APPLICABLE");
  EXPECT_TRUE(to_json(na)["left"].is_null());

  const auto tiles = run_compare(oracle::load("tile_024.json"), oracle::load("tile_034.json"), quick());
  EXPECT_EQ(tiles.verdict, "EQUIVALENT");
  EXPECT_TRUE(tiles.self_affine);
  EXPECT_FALSE(tiles.reasons.empty());

  const auto dims = run_compare(touching, oracle::load("tile_034.json"), quick());
  EXPECT_EQ(dims.verdict, "NOT_APPLICABLE");
}

TEST(Svg, OneGroupPerComponent) {
  for (const auto& name : oracle::fixtures()) {
    const Geometry geo(oracle::load(name));
    for (std::size_t level = 1; level <= 3; ++level) {
      AugmentedTree tree(geo);
      const std::size_t comps = tree.components_at(level).size();
      const std::string svg = emit_svg(geo, level);
      EXPECT_EQ(count(svg, "class=\"component\""), comps) << name << " " << level;
      std::size_t cells = 1;
      for (std::size_t n = 0; n < level; ++n) cells *= geo.spec().maps();
      EXPECT_EQ(count(svg, "<title>") - 1, cells) << name;
      EXPECT_EQ(svg, emit_svg(geo, level));
      EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
    }
  }
}

TEST(Svg, TileLevelTwoGrouping) {
  const Geometry geo(oracle::load("tile_034.json"));
  const std::string svg = emit_svg(geo, 2);
  EXPECT_EQ(count(svg, "class=\"component\""), 5u);
  EXPECT_EQ(count(svg, "<circle"), 9u);
  EXPECT_NE(svg.find("class=\"edges\""), std::string::npos);
  const Geometry boxes(oracle::load("touching_034.json"));
  EXPECT_EQ(count(emit_svg(boxes, 2), "<rect"), 9u);
  const Geometry plane(oracle::load("overlapping_plane.json"));
  EXPECT_EQ(count(emit_svg(plane, 1), "<polygon"), 5u);
}
