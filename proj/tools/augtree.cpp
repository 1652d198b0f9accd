#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "augtree/augtree.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

augtree::IfsSpec load(const std::string& path) { return augtree::parse_spec(read_file(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented trees of self-similar sets: simplicity, incidence matrices and dust-like equivalence"};
  app.require_subcommand(1);

  augtree::Options opt;
  std::size_t max_depth = 0;
  std::string json_path;
  std::string svg_path;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--max-depth", max_depth, "override caps.max_depth");
    sub->add_option("--k-max", opt.k_max, "largest matrix power tried for rearrangement")->default_val(6);
    sub->add_flag("--merge-isomorphic", opt.merge_isomorphic, "merge classes with isomorphic two-level graphs");
    sub->add_option("--seed", opt.seed, "seed for sampled diagnostics")->default_val(1);
    sub->add_option("--threads", opt.threads, "worker threads for the distortion audit")->default_val(1);
    sub->add_flag("--timing", opt.timing, "include wall-clock timings in the JSON report");
    sub->add_option("--json", json_path, "write the JSON report to a file, or '-' for stdout");
  };

  std::string config;
  auto* analyze = app.add_subcommand("analyze", "analyze one IFS configuration");
  analyze->add_option("config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  common(analyze);

  std::string config_b;
  auto* compare = app.add_subcommand("compare", "compare two configurations for Lipschitz equivalence");
  compare->add_option("config_a", config, "first configuration")->required()->check(CLI::ExistingFile);
  compare->add_option("config_b", config_b, "second configuration")->required()->check(CLI::ExistingFile);
  common(compare);

  auto* neighbors = app.add_subcommand("neighbors", "print the neighbor set of a tile configuration");
  neighbors->add_option("config", config, "JSON configuration")->required()->check(CLI::ExistingFile);

  std::size_t sigma_depth = 2;
  auto* sigma = app.add_subcommand("sigma", "print the level permutation tables of the near-isometry");
  sigma->add_option("config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  sigma->add_option("--depth", sigma_depth, "iterated levels to tabulate")->default_val(2);
  common(sigma);

  std::size_t plot_level = 2;
  auto* plot = app.add_subcommand("plot", "draw the cells of one level as SVG");
  plot->add_option("config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  plot->add_option("--level", plot_level, "level to draw")->default_val(2);
  plot->add_option("--svg", svg_path, "output path, or '-' for stdout")->default_val("-");

  CLI11_PARSE(app, argc, argv);
  if (max_depth) opt.max_depth = max_depth;

  try {
    if (*analyze) {
      const auto report = augtree::run_analyze(load(config), opt);
      if (!json_path.empty()) write_output(json_path, augtree::to_json(report).dump(2) + "\n");
      if (json_path != "-") std::cout << augtree::to_text(report);
    } else if (*compare) {
      const auto cmp = augtree::run_compare(load(config), load(config_b), opt);
      if (!json_path.empty()) write_output(json_path, augtree::to_json(cmp).dump(2) + "\n");
      if (json_path != "-") {
        std::cout << "comparison: " << cmp.verdict << "\n  " << cmp.text << "\n";
        for (const auto& r : cmp.reasons) std::cout << "  " << r << "\n";
      }
    } else if (*neighbors) {
      const augtree::Geometry geo(load(config));
      if (!geo.neighbors()) {
        std::cout << augtree::neighbors_json({{}, augtree::NeighborProvenance::box_predicate}).dump(2) << "\n";
      } else {
        std::cout << augtree::neighbors_json(*geo.neighbors()).dump(2) << "\n";
      }
    } else if (*sigma) {
      auto spec = load(config);
      if (opt.max_depth) spec.caps.max_depth = *opt.max_depth;
      const augtree::Geometry geo(spec);
      auto cls = augtree::classify(geo);
      if (opt.merge_isomorphic) cls = augtree::merge_isomorphic(geo, cls);
      nlohmann::json j;
      std::optional<augtree::PowerOutcome> outcome;
      if (cls.simple() && augtree::analyze_matrix(cls.incidence, cls.sizes, static_cast<std::int64_t>(cls.maps)).eigen_ok)
        outcome = augtree::rearrange_power(cls.incidence, cls.sizes, static_cast<std::int64_t>(cls.maps), opt.k_max);
      if (!outcome || !outcome->certificate) {
        j = {{"constructed", false}, {"reason", "near-isometry not constructed: no rearrangement certificate"}};
      } else {
        augtree::AugmentedTree tree(geo);
        const auto map = augtree::build_sigma(tree, cls, *outcome->certificate, sigma_depth);
        nlohmann::json levels = nlohmann::json::array();
        for (std::size_t n = 0; n < map.levels.size(); ++n) {
          nlohmann::json table = nlohmann::json::object();
          for (std::uint64_t i = 0; i < map.levels[n].size(); ++i)
            table[augtree::word_to_string(augtree::index_word(i, n * map.order, map.maps))] =
                augtree::word_to_string(augtree::index_word(map.levels[n][i], n * map.order, map.maps));
          levels.push_back(table);
        }
        nlohmann::json pools = nlohmann::json::array();
        for (const auto& rec : map.pools) {
          nlohmann::json groups = nlohmann::json::array();
          for (std::size_t s = 0; s < rec.pools.size(); ++s) {
            nlohmann::json comps = nlohmann::json::array();
            for (const auto& w : rec.pools[s]) comps.push_back(augtree::word_to_string(w));
            groups.push_back({{"target", augtree::word_to_string(rec.targets[s])}, {"components", comps}});
          }
          pools.push_back({{"level", rec.level},
                           {"parent", augtree::word_to_string(rec.parent)},
                           {"class", rec.cls + 1},
                           {"pools", groups}});
        }
        j = {{"constructed", true},
             {"order", map.order},
             {"depth", map.depth},
             {"certificate", augtree::certificate_json(*outcome->certificate)},
             {"levels", levels},
             {"pools", pools}};
      }
      const std::string text = j.dump(2) + "\n";
      write_output(json_path.empty() ? "-" : json_path, text);
    } else if (*plot) {
      const augtree::Geometry geo(load(config));
      write_output(svg_path, augtree::emit_svg(geo, plot_level));
    }
  } catch (const augtree::SpecError& e) {
    std::cerr << "invalid configuration (" << e.invariant() << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
