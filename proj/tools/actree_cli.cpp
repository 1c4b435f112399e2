// Command-line front end: validation, Pleaf sweeps, time-bounded curves,
// countermeasure ranking and CTMC export.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "actree/actree.hpp"

namespace fs = std::filesystem;
using namespace actree;

namespace {

enum Exit { kOk = 0, kIo = 1, kValidation = 2, kNumeric = 3 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  std::size_t points = 101;

  std::vector<double> values() const {
    std::vector<double> v(points);
    for (std::size_t i = 0; i < points; ++i) {
      v[i] = i + 1 == points ? stop : start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return v;
  }
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%zu%c", &g.start, &g.stop, &g.points, &tail) != 3) {
    throw CLI::ValidationError("--grid", "expected START:STOP:STEPS, got '" + text + "'");
  }
  if (g.points < 2) throw CLI::ValidationError("--grid", "grid needs at least 2 points");
  if (!(g.stop > g.start)) throw CLI::ValidationError("--grid", "STOP must exceed START");
  return g;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Act load_model(const std::string& path) { return parse_act(read_file(path)); }

struct Options {
  std::string model;
  std::vector<std::string> scenarios;
  std::string grid;
  double epsilon = 1e-6;
  std::uint64_t runs = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out = ".";
  std::string format = "dat";
  std::vector<double> pleaf;
  bool keep_leaves = false;
  std::string backend = "solver";
  double t_star = 2.0;
  std::string json;
  std::string construction = "direct";
};

std::vector<Scenario> scenarios_of(const Options& o) {
  std::vector<Scenario> out;
  if (o.scenarios.empty()) return {std::begin(kAllScenarios), std::end(kAllScenarios)};
  for (const auto& s : o.scenarios) out.push_back(parse_scenario(s));
  return out;
}

/// Serialises one curve. `.dat` is a two-column table with `#` comments only.
std::string render(const std::string& format, const char* xname, const std::vector<std::string>& comments,
                   const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& hw,
                   const nlohmann::ordered_json& meta) {
  std::string s;
  if (format == "dat") {
    for (const auto& c : comments) s += "# " + c + "\n";
    for (std::size_t i = 0; i < xs.size(); ++i) s += num(xs[i]) + " " + num(ys[i]) + "\n";
  } else if (format == "csv") {
    s += std::string(xname) + ",pgoal" + (hw.empty() ? "" : ",half_width") + "\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      s += num(xs[i]) + "," + num(ys[i]);
      if (!hw.empty()) s += "," + num(hw[i]);
      s += "\n";
    }
  } else {
    nlohmann::ordered_json j;
    j["meta"] = meta;
    j[xname] = xs;
    j["pgoal"] = ys;
    if (!hw.empty()) j["half_width"] = hw;
    s = j.dump(2) + "\n";
  }
  return s;
}

fs::path output_dir(const Options& o) {
  fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + o.out + "': " + ec.message());
  return dir;
}

int cmd_validate(const Options& o) {
  const std::string text = read_file(o.model);
  try {
    const Act act = parse_act(text);
    std::cout << "ok: \"" << act.title << "\": " << act.size() << " nodes, " << act.nodes_of<AttackLeaf>().size()
              << " attack events, " << act.nodes_of<CmGate>().size() << " countermeasures\n";
    return kOk;
  } catch (const ValidationError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.str() << "\n";
    return kValidation;
  }
}

int cmd_static_sweep(const Options& o) {
  const Act act = load_model(o.model);
  const auto grid = parse_grid(o.grid.empty() ? "0:1:101" : o.grid).values();
  const auto scenarios = scenarios_of(o);
  const fs::path dir = output_dir(o);
  for (const auto& r : sweep_pleaf(act, grid, scenarios)) {
    const std::string tag(to_string(r.scenario));
    nlohmann::ordered_json meta{{"model", act.title}, {"scenario", tag}, {"analysis", "static"}};
    const fs::path file = dir / ("static_" + tag + "." + o.format);
    write_file(file, render(o.format, "pleaf", {act.title + ": Pgoal vs Pleaf, scenario " + tag, "Pleaf Pgoal"},
                            r.grid, r.pgoal, {}, meta));
    std::cout << file.string() << "\n";
  }
  return kOk;
}

int cmd_dynamic(const Options& o, const std::string& prefix, bool simulator) {
  const Act act = load_model(o.model);
  const auto times = parse_grid(o.grid.empty() ? "0:10:101" : o.grid).values();
  const auto scenarios = scenarios_of(o);
  const fs::path dir = output_dir(o);
  std::vector<double> pleafs = o.pleaf;
  if (pleafs.empty() && !o.keep_leaves) pleafs = {0.05, 0.1, 0.25};

  auto run = [&](const Act& model, Scenario s, const std::string& suffix, const std::string& pleaf_note) {
    const std::string tag(to_string(s));
    CurveResult curve;
    if (simulator) {
      curve = simulate(model, s, times, SimulationOptions{o.runs, o.seed, o.threads});
    } else {
      curve = transient_probability(compose(model, s), times, o.epsilon);
      curve.scenario = tag;
    }
    nlohmann::ordered_json meta{{"model", act.title}, {"scenario", tag}, {"pleaf", pleaf_note}};
    std::string settings;
    for (const auto& [k, v] : curve.meta) {
      meta[k] = v;
      settings += (settings.empty() ? "" : " ") + k + "=" + v;
    }
    const fs::path file = dir / (prefix + "_" + tag + suffix + "." + o.format);
    write_file(file, render(o.format, "time",
                            {act.title + ": Pgoal vs time (hours), scenario " + tag + ", pleaf " + pleaf_note, settings,
                             "Time Pgoal"},
                            curve.xs, curve.ys, curve.half_width, meta));
    std::cout << file.string() << "\n";
  };

  for (Scenario s : scenarios) {
    if (pleafs.empty()) {
      run(act, s, "", "model");
      continue;
    }
    for (double p : pleafs) run(with_attack_probability(act, p), s, "_p" + num(p), num(p));
  }
  return kOk;
}

int cmd_rank(const Options& o) {
  const Act act = load_model(o.model);
  const auto effects = rank_countermeasures(act, o.t_star, o.epsilon);
  std::printf("%-32s %12s %12s %12s\n", "name", "pgoal_with", "pgoal_without", "delta");
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& e : effects) {
    std::printf("%-32s %12s %12s %12s\n", e.name.c_str(), num(e.pgoal_with).c_str(), num(e.pgoal_without).c_str(),
                num(e.delta).c_str());
    rows.push_back({{"name", e.name},
                    {"label", act.node(e.cm).display_name()},
                    {"pgoal_with", e.pgoal_with},
                    {"pgoal_without", e.pgoal_without},
                    {"delta", e.delta}});
  }
  if (!o.json.empty()) {
    nlohmann::ordered_json j{{"model", act.title}, {"t_star", o.t_star}, {"epsilon", o.epsilon}, {"ranking", rows}};
    write_file(o.json, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_export(const Options& o) {
  const Act act = load_model(o.model);
  const Scenario s = o.scenarios.empty() ? Scenario::Full : parse_scenario(o.scenarios.front());
  const Ctmc c = o.construction == "imc" ? compose_imc_product(act, s) : compose(act, s);
  const fs::path file = output_dir(o) / ("ctmc_" + std::string(to_string(s)) + ".txt");
  write_file(file, "# " + act.title + ", scenario " + std::string(to_string(s)) + ", " + o.construction +
                       " construction\n" + export_ctmc(c));
  std::cout << file.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attack countermeasure tree analysis"};
  app.require_subcommand(1);
  Options o;

  auto model = [&](CLI::App* sub) { sub->add_option("--model", o.model, "ACT model file")->required(); };
  auto scenario = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenarios, "no-cm, detect-only or full (repeatable; default all)")
        ->check(CLI::IsMember({"no-cm", "detect-only", "full"}));
  };
  auto output = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "dat, csv or json")->check(CLI::IsMember({"dat", "csv", "json"}));
  };
  auto timed = [&](CLI::App* sub) {
    sub->add_option("--grid", o.grid, "time grid START:STOP:STEPS in hours (default 0:10:101)");
    sub->add_option("--pleaf", o.pleaf, "attack leaf probabilities (default 0.05 0.1 0.25)")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_flag("--keep-leaves", o.keep_leaves, "use the model's own leaf parameters");
    sub->add_option("--epsilon", o.epsilon, "uniformization error bound")->check(CLI::Range(1e-15, 1e-3));
    sub->add_option("--runs", o.runs, "simulation runs")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "simulation seed");
    sub->add_option("--threads", o.threads, "simulation threads (0: all cores)");
  };

  auto* validate = app.add_subcommand("validate", "check a model and list diagnostics");
  model(validate);

  auto* sweep = app.add_subcommand("static-sweep", "Pgoal versus Pleaf for each scenario");
  model(sweep);
  scenario(sweep);
  sweep->add_option("--grid", o.grid, "Pleaf grid START:STOP:STEPS (default 0:1:101)");
  output(sweep);

  auto* dynamic = app.add_subcommand("dynamic", "Pgoal versus time for each scenario and pleaf");
  model(dynamic);
  scenario(dynamic);
  timed(dynamic);
  dynamic->add_option("--backend", o.backend, "solver or simulator")->check(CLI::IsMember({"solver", "simulator"}));
  output(dynamic);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo Pgoal versus time with 3-sigma half-widths");
  model(sim);
  scenario(sim);
  timed(sim);
  output(sim);

  auto* rank = app.add_subcommand("rank", "rank countermeasures by their effect on Pgoal at t*");
  model(rank);
  rank->add_option("--t-star", o.t_star, "evaluation time in hours")->check(CLI::PositiveNumber);
  rank->add_option("--epsilon", o.epsilon, "uniformization error bound")->check(CLI::Range(1e-15, 1e-3));
  rank->add_option("--json", o.json, "also write the ranking as JSON");

  auto* exp = app.add_subcommand("export-ctmc", "write the composed CTMC as a transition list");
  model(exp);
  exp->add_option("--scenario", o.scenarios, "no-cm, detect-only or full (default full)")
      ->check(CLI::IsMember({"no-cm", "detect-only", "full"}));
  exp->add_option("--construction", o.construction, "direct or imc")->check(CLI::IsMember({"direct", "imc"}));
  exp->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (validate->parsed()) return cmd_validate(o);
    if (sweep->parsed()) return cmd_static_sweep(o);
    if (dynamic->parsed()) return cmd_dynamic(o, "dynamic", o.backend == "simulator");
    if (sim->parsed()) return cmd_dynamic(o, "simulate", true);
    if (rank->parsed()) return cmd_rank(o);
    if (exp->parsed()) return cmd_export(o);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << o.model << ":" << e.what() << "\n";
    return kValidation;
  } catch (const ValidationError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.str() << "\n";
    return kValidation;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}
