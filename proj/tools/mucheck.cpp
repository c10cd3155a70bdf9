// Command-line frontend: parsing, model checking, disjunctive form,
// challenge games, Psi^n extraction, the Sigma2 decision and the
// falsification harness.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mucalc/formula.hpp"
#include "mucalc/lts.hpp"
#include "mucalc/mcgame.hpp"

using namespace mucalc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_parse(const std::string& formula_text, bool json) {
  Formula f = parse_formula(formula_text);
  auto [idx, pa] = compute_index(f);
  if (json) {
    nlohmann::json j;
    j["formula"] = serialize(f);
    j["index"] = idx.str();
    j["class"] = idx.alt_class().str();
    j["guarded"] = analyze(f.root).guarded;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << serialize(f) << "\n";
    std::cout << "index: " << idx.str() << "\n";
    std::cout << "class: " << idx.alt_class().str() << "\n";
  }
  return 0;
}

int run_mc(const std::string& lts_text, const std::string& formula_text, bool json,
           bool dump_regions) {
  Lts m = parse_lts(lts_text);
  Formula f = normalize(parse_formula(formula_text));
  McGame g = build_mc_game(m, f);
  auto sol = solve(g.game);
  bool holds = sol.even_wins(g.game.init);
  if (json) {
    nlohmann::json j;
    j["holds"] = holds;
    if (dump_regions) {
      nlohmann::json regions = nlohmann::json::array();
      for (int v = 0; v < g.game.size(); ++v) {
        auto [s, n] = g.info[v];
        regions.push_back({{"state", m.states[s]},
                           {"subformula", to_string(FPtr(n, [](const FNode*) {}))},
                           {"winner", sol.even_wins(v) ? "even" : "odd"}});
      }
      j["vertices"] = regions;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (holds ? "true" : "false") << "\n";
    if (dump_regions) {
      for (int v = 0; v < g.game.size(); ++v) {
        auto [s, n] = g.info[v];
        std::cout << m.states[s] << " x " << to_string(FPtr(n, [](const FNode*) {}))
                  << " : " << (sol.even_wins(v) ? "even" : "odd") << "\n";
      }
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"modal mu-calculus index analysis toolkit"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "machine-readable output");

  std::string formula_arg, formula_file, lts_file;
  int n_arg = 0, max_states = 4;

  auto add_formula_opts = [&](CLI::App* cmd) {
    cmd->add_option("--formula", formula_arg, "formula text");
    cmd->add_option("--formula-file", formula_file, "file with formula text");
  };
  auto the_formula = [&]() -> std::string {
    if (!formula_file.empty()) return slurp(formula_file);
    if (formula_arg.empty()) throw CLI::ValidationError("--formula required");
    return formula_arg;
  };

  auto* cparse = app.add_subcommand("parse", "echo canonical form, index and class");
  add_formula_opts(cparse);

  auto* cmc = app.add_subcommand("mc", "model check a formula on an LTS");
  add_formula_opts(cmc);
  cmc->add_option("--lts", lts_file, "LTS file")->required();
  bool dump_regions = false;
  cmc->add_flag("--regions", dump_regions, "dump winning regions");

  try {
    app.parse(argc, argv);
    if (cparse->parsed()) return run_parse(the_formula(), json);
    if (cmc->parsed()) return run_mc(slurp(lts_file), the_formula(), json, dump_regions);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
