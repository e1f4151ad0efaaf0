#pragma once

// hpdesign command-line front end. `run` is the whole program; main.cpp only
// forwards to it so tests can drive commands in-process.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hpdesign/hpdesign.hpp"

namespace hpdesign::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int { kOk = 0, kUsage = 1, kCap = 2, kSolverFailure = 3 };

inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::LimitExceeded:
    case Errc::TooLarge:
    case Errc::StateTooLarge:
    case Errc::SolverCapExceeded:
    case Errc::ComponentTooLarge:
      return kCap;
    case Errc::CgNoConvergence:
    case Errc::DegenerateDifference:
    case Errc::DegenerateSpectrum:
      return kSolverFailure;
    default:
      return kUsage;
  }
}

/// Systems of the pure-QPU benchmark: (N, N_H, chain strength). k = 2 for
/// N = 10 and 3 otherwise.
struct BenchmarkSystem {
  int n;
  int n_h;
  double j_cs;
};

inline const std::vector<BenchmarkSystem>& benchmark_systems() {
  static const std::vector<BenchmarkSystem> table = {
      {10, 4, 2.25}, {11, 5, 2.25}, {12, 4, 2.25}, {12, 6, 2.75}, {13, 6, 2.75}, {13, 8, 2.75},
      {14, 6, 3.00}, {14, 8, 3.00}, {15, 5, 3.25}, {15, 6, 3.00}, {16, 6, 3.00}, {16, 7, 3.00},
      {16, 8, 3.25}, {17, 6, 3.50}, {17, 7, 3.50}, {18, 8, 3.50}, {18, 9, 3.75}, {19, 8, 3.75},
      {19, 9, 4.00}, {20, 8, 4.25}, {20, 9, 4.00}, {20, 11, 4.25},
  };
  return table;
}

inline int benchmark_k(int n) { return n == 10 ? 2 : 3; }

namespace detail {

/// Reads a key=value file into "--key value" arguments for keys that are
/// not already on the command line.
inline std::vector<std::string> config_arguments(const std::string& path, const std::vector<std::string>& given) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open config " + path);
  std::set<std::string> present;
  for (const auto& a : given) {
    if (a.rfind("--", 0) == 0) present.insert(a.substr(0, a.find('=')));
  }
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    std::string flag = "--" + key;
    if (present.count(flag)) continue;
    if (value == "true") {
      out.push_back(flag);
    } else if (value != "false") {
      out.push_back(flag);
      out.push_back(value);
    }
  }
  return out;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path.string());
  out << text;
}

}  // namespace detail

/// Everything a command needs to describe the problem it works on.
struct SystemArgs {
  std::string structure_file;
  std::string ising_file;
  int target_n = 0;
  int n_h = -1;
  std::string lambda = "1.1";
  int designability_limit = kDefaultDesignabilityLimit;
};

struct System {
  std::string id;
  std::optional<LatticeStructure> target;
  int n = 0;
  std::optional<int> n_h;
  Rational lambda{0};
  IsingProblem ising;
};

inline void add_system_options(CLI::App* cmd, SystemArgs& a, bool allow_ising) {
  auto* s = cmd->add_option("--structure", a.structure_file, "structure file (move-string, optional sequence)");
  auto* t = cmd->add_option("--target-n", a.target_n, "use the most designable N-bead structure");
  s->excludes(t);
  if (allow_ising) cmd->add_option("--ising", a.ising_file, "Ising export file")->excludes(s)->excludes(t);
  cmd->add_option("--nh", a.n_h, "number of H beads");
  cmd->add_option("--lambda", a.lambda, "composition penalty (exact decimal or p/q)")->capture_default_str();
  cmd->add_option("--designability-limit", a.designability_limit, "largest N for --target-n")->capture_default_str();
}

inline LatticeStructure resolve_target(const SystemArgs& a) {
  if (!a.structure_file.empty()) return read_structure_file(a.structure_file).structure;
  if (a.target_n > 0) return most_designable(a.target_n, a.designability_limit);
  throw Error(Errc::InvalidArgument, "one of --structure or --target-n is required");
}

inline System resolve_system(const SystemArgs& a) {
  System sys;
  sys.lambda = parse_rational(a.lambda);
  if (!a.ising_file.empty()) {
    sys.ising = read_ising_file(a.ising_file);
    sys.n = sys.ising.n;
    if (a.n_h >= 0) sys.n_h = a.n_h;
    sys.id = fs::path(a.ising_file).stem().string();
    return sys;
  }
  sys.target = resolve_target(a);
  sys.n = static_cast<int>(sys.target->size());
  if (a.n_h < 0) throw Error(Errc::InvalidArgument, "--nh is required");
  sys.n_h = a.n_h;
  sys.ising = to_ising(DesignEnergyModel(contact_map(*sys.target), sys.lambda, a.n_h));
  sys.id = (a.target_n > 0 ? "T" + std::to_string(a.target_n) : sys.target->moves()) + "_nh" + std::to_string(a.n_h);
  return sys;
}

/// Collects the resolved option values of a subcommand for the manifest and
/// the argument list that reproduces the run.
struct Recorded {
  json params = json::object();
  std::vector<std::string> argv;
};

inline Recorded record(const CLI::App* cmd, const std::set<std::string>& skip) {
  Recorded r;
  for (const CLI::Option* opt : cmd->get_options()) {
    std::string name = opt->get_name(false, true);
    if (name.rfind("--", 0) != 0) continue;
    if (name == "--help" || skip.count(name)) continue;
    bool is_flag = opt->get_expected_min() == 0;
    std::string value;
    if (opt->count() > 0) {
      if (is_flag) {
        value = "true";
      } else {
        const auto& res = opt->results();
        for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
      }
    } else {
      value = is_flag ? "false" : opt->get_default_str();
    }
    r.params[name.substr(2)] = value;
    if (opt->count() > 0) {
      r.argv.push_back(name);
      if (!is_flag) r.argv.push_back(value);
    }
  }
  return r;
}

struct RunContext {
  fs::path out_dir = ".";
  std::string command;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  fs::path output(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }

  void write_manifest(const Recorded& rec, std::optional<std::uint64_t> seed) const {
    json m;
    m["command"] = command;
    m["argv"] = rec.argv;
    m["params"] = rec.params;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["version"] = kVersion;
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m["outputs"] = outputs;
    detail::write_text(out_dir / "manifest.json", m.dump(2) + "\n");
  }
};

inline std::string csv_number(double v) { return format_double(v); }

// ---------------------------------------------------------------- enumerate

inline int cmd_enumerate(RunContext& ctx, int n, bool with_designability, int limit) {
  auto structures = enumerate_structures(n, std::max(limit, kDefaultStructureLimit));
  std::ostringstream bank;
  if (!with_designability) {
    bank << "canonical_moves,designability_count\n";
    for (const auto& s : structures) bank << s.moves() << ",\n";
    detail::write_text(ctx.output("databank.csv"), bank.str());
    std::cout << structures.size() << " structures\n";
    return kOk;
  }
  auto table = designability(n, limit);
  std::map<std::string, std::uint64_t> counts;
  for (const auto& r : table.records) counts[r.moves] = r.count;
  bank << "canonical_moves,designability_count\n";
  for (const auto& m : table.structure_moves) bank << m << ',' << counts[m] << '\n';
  detail::write_text(ctx.output("databank.csv"), bank.str());
  std::ostringstream ranking;
  write_databank_csv(ranking, table.records);
  detail::write_text(ctx.output("ranking.csv"), ranking.str());
  std::cout << structures.size() << " structures; most designable " << table.most_designable().moves << " ("
            << table.most_designable().count << ")\n";
  return kOk;
}

// ------------------------------------------------------------------- design

inline int cmd_design(RunContext& ctx, const SystemArgs& a, const std::string& solver, int budget, std::uint64_t seed,
                      const DesignOptions& options) {
  auto target = resolve_target(a);
  if (a.n_h < 0) throw Error(Errc::InvalidArgument, "--nh is required");
  auto report = design(target, a.n_h, parse_rational(a.lambda), parse_solver(solver), budget, seed, options);
  detail::write_text(ctx.output("design_report.json"), to_json(report).dump(2) + "\n");
  std::cout << report.candidates.size() << " candidates: " << report.count(Verdict::UniqueGs) << " UNIQUE_GS, "
            << report.count(Verdict::DegenerateGs) << " DEGENERATE_GS, " << report.count(Verdict::BetterElsewhere)
            << " BETTER_ELSEWHERE, " << report.count(Verdict::Unverified) << " UNVERIFIED\n";
  if (report.candidates.empty()) {
    std::cerr << "no sequence reached the oracle minimum E_HP " << report.oracle_min_ehp << "\n";
    return kSolverFailure;
  }
  return kOk;
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string driver = "x";
  double t_f = 20.0;
  double eps = 0.01;
  bool trace = false;
  std::int64_t trace_every = 1;
  int reads = 0;
  bool subspace = false;
  std::optional<double> driver_sign;
};

inline Driver parse_driver(const std::string& s) {
  if (s == "x" || s == "X") return Driver::X;
  if (s == "xy" || s == "XY") return Driver::XY;
  throw Error(Errc::InvalidArgument, "driver must be x or xy");
}

inline int cmd_simulate(RunContext& ctx, const SystemArgs& a, const SimulateArgs& s, std::uint64_t seed) {
  auto sys = resolve_system(a);
  if (sys.n > kMaxSimulatedQubits) throw Error(Errc::StateTooLarge, "at most 20 qubits can be simulated");
  Driver driver = parse_driver(s.driver);
  auto ground = spectrum(sys.ising).ground_states;
  IntegratorConfig cfg;
  cfg.eps = s.eps;
  AnnealOptions opts;
  opts.driver_sign = s.driver_sign;
  opts.restrict_to_subspace = s.subspace;

  std::ostringstream trace_text;
  TraceSink sink;
  if (s.trace) {
    write_trace_header(trace_text);
    sink.record = [&](const TracePoint& p) { write_trace_row(trace_text, p); };
    sink.ground_set = ground;
    if (driver == Driver::XY) sink.weight = sys.n_h;
    sink.every = s.trace_every;
  }
  auto psi = evolve(to_float(sys.ising), driver, AnnealSchedule(s.t_f), cfg, sys.n_h, opts, s.trace ? &sink : nullptr);
  double p_g = ground_state_probability(psi, ground);

  json result;
  result["system"] = sys.id;
  result["n"] = sys.n;
  result["driver"] = driver == Driver::X ? "x" : "xy";
  result["t_f"] = s.t_f;
  result["eps"] = s.t_f / static_cast<double>(cfg.steps_for(s.t_f));
  result["steps"] = cfg.steps_for(s.t_f);
  result["p_g"] = p_g;
  result["norm"] = psi.norm();
  json gs = json::array();
  for (auto g : ground) gs.push_back(HpSequence::from_mask(g, sys.n).str());
  result["ground_states"] = gs;
  if (s.reads > 0) {
    auto samples = sample_bitstrings(psi, static_cast<std::size_t>(s.reads), seed);
    std::set<std::uint64_t> ground_lookup(ground.begin(), ground.end());
    std::map<std::string, std::uint64_t> tally;
    std::uint64_t hits = 0;
    for (auto x : samples) {
      ++tally[HpSequence::from_mask(x, sys.n).str()];
      hits += ground_lookup.count(x);
    }
    std::ostringstream reads;
    reads << "sequence,count\n";
    for (const auto& [seq, c] : tally) reads << seq << ',' << c << '\n';
    detail::write_text(ctx.output("reads.csv"), reads.str());
    result["reads"] = s.reads;
    result["hit_rate"] = static_cast<double>(hits) / static_cast<double>(s.reads);
  }
  if (s.trace) detail::write_text(ctx.output("trace.csv"), trace_text.str());
  detail::write_text(ctx.output("simulate.json"), result.dump(2) + "\n");
  std::cout << "P_g=" << csv_number(p_g) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------- chi

inline int cmd_chi(RunContext& ctx, const SystemArgs& a, const std::string& driver_name, std::vector<double> tf_list,
                   std::vector<double> eps_list, std::optional<double> driver_sign) {
  if (eps_list.size() < 3) throw Error(Errc::InvalidArgument, "need at least 3 resolutions in --eps-list");
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (std::abs(eps_list[i - 1] / eps_list[i] - 2.0) > 1e-9) {
      throw Error(Errc::InvalidArgument, "consecutive resolutions must differ by a factor of 2");
    }
  }
  if (tf_list.empty()) throw Error(Errc::InvalidArgument, "--tf needs at least one value");
  auto sys = resolve_system(a);
  if (sys.n > kMaxSimulatedQubits) throw Error(Errc::StateTooLarge, "at most 20 qubits can be simulated");
  Driver driver = parse_driver(driver_name);
  auto ground = spectrum(sys.ising).ground_states;
  auto problem = to_float(sys.ising);
  AnnealOptions opts;
  opts.driver_sign = driver_sign;

  std::ostringstream csv;
  csv << "t_f,eps,P_g,chi\n";
  for (double tf : tf_list) {
    for (double e : eps_list) {
      double m = tf / e;
      if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m)) {
        throw Error(Errc::InvalidArgument, "eps " + csv_number(e) + " does not divide t_f " + csv_number(tf));
      }
    }
    std::vector<double> p(eps_list.size());
    parallel_for(
        eps_list.size(),
        [&](std::size_t i) {
          IntegratorConfig cfg;
          cfg.eps = eps_list[i];
          p[i] = ground_state_probability(evolve(problem, driver, AnnealSchedule(tf), cfg, sys.n_h, opts), ground);
        },
        1);
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
      csv << csv_number(tf) << ',' << csv_number(eps_list[i]) << ',' << csv_number(p[i]) << ',';
      if (i > 0 && i + 1 < eps_list.size()) {
        double den = p[i - 1] - p[i];
        if (std::abs(den) < 1e-14) throw Error(Errc::DegenerateDifference, "P_g(2 eps) - P_g(eps) vanishes");
        csv << csv_number((p[i] - p[i + 1]) / den);
      }
      csv << '\n';
    }
  }
  detail::write_text(ctx.output("chi.csv"), csv.str());
  std::cout << csv.str();
  return kOk;
}

// -------------------------------------------------------------------- noise

struct NoiseArgs {
  std::vector<double> x = {0.015};
  int k = 1;
  std::vector<double> jcs = {1.0};
  std::uint64_t samples = 10000;
  std::string sweep = "none";
  double min_gap = 1.0;
};

inline int cmd_noise(RunContext& ctx, const SystemArgs& a, const NoiseArgs& na, std::uint64_t seed) {
  std::vector<NoiseRow> rows;
  json fit = json::object();
  if (na.sweep == "n") {
    std::vector<NoiseSystem> systems;
    std::vector<NoiseRow> meta;
    const Rational lambda = parse_rational(a.lambda);
    const Rational min_gap = parse_rational(format_double(na.min_gap));
    for (const auto& b : benchmark_systems()) {
      if (b.n > a.designability_limit || b.n > kMaxIndexedBeads) continue;
      auto target = most_designable(b.n, a.designability_limit);
      auto problem = to_ising(DesignEnergyModel(contact_map(target), lambda, b.n_h));
      if (spectrum(problem).gap < min_gap) continue;
      for (double x : na.x) {
        systems.push_back({b.n, problem, NoiseSpec{x, benchmark_k(b.n), b.j_cs}});
        meta.push_back({"T" + std::to_string(b.n) + "_nh" + std::to_string(b.n_h), b.n, b.n_h, lambda, {}});
      }
    }
    if (systems.empty()) throw Error(Errc::InvalidArgument, "no benchmark system within the designability limit");
    std::map<double, std::vector<std::size_t>> by_x;
    for (std::size_t i = 0; i < systems.size(); ++i) by_x[systems[i].spec.x].push_back(i);
    rows = meta;
    for (const auto& [x, members] : by_x) {
      std::vector<NoiseSystem> subset;
      for (auto i : members) subset.push_back(systems[i]);
      auto res = n_sweep(subset, na.samples, seed);
      for (std::size_t j = 0; j < members.size(); ++j) rows[members[j]].result = res.rows[j];
      fit[csv_number(x)] = res.log_slope ? json(*res.log_slope) : json(nullptr);
    }
  } else {
    if (na.sweep != "none" && na.sweep != "jcs" && na.sweep != "x") {
      throw Error(Errc::InvalidArgument, "--sweep must be none, jcs, x or n");
    }
    auto sys = resolve_system(a);
    if (sys.n > kMaxSpectrumSpins) throw Error(Errc::TooLarge, "noise scan limited to 24 spins");
    for (double x : na.x) {
      auto series = jcs_sweep(sys.ising, x, na.k, na.jcs, na.samples, seed);
      for (auto& r : series) rows.push_back({sys.id, sys.n, sys.n_h.value_or(-1), sys.lambda, r});
    }
  }
  std::ostringstream csv;
  write_noise_csv(csv, rows);
  detail::write_text(ctx.output("noise_sweep.csv"), csv.str());
  if (na.sweep == "n") {
    json out = {{"log_slope_by_x", fit}, {"samples", na.samples}, {"seed", seed}};
    detail::write_text(ctx.output("noise_fit.json"), out.dump(2) + "\n");
  }
  std::cout << csv.str();
  if (na.sweep == "n") {
    for (const auto& el : fit.items()) std::cout << "x=" << el.key() << " slope " << el.value().dump() << "\n";
  }
  return kOk;
}

// -------------------------------------------------------------------- ising

inline int cmd_ising(RunContext& ctx, const SystemArgs& a) {
  auto sys = resolve_system(a);
  std::ostringstream text;
  write_ising(text, sys.ising);
  detail::write_text(ctx.output("ising.txt"), text.str());
  if (sys.n <= kMaxSpectrumSpins) {
    auto sp = spectrum(sys.ising);
    std::cout << "ground_energy " << to_string(sp.ground_energy) << " gap " << to_string(sp.gap) << " ground_states";
    for (auto g : sp.ground_states) std::cout << ' ' << HpSequence::from_mask(g, sys.n).str();
    std::cout << "\n";
  }
  return kOk;
}

// --------------------------------------------------------------------- main

int run(int argc, char** argv);

inline int run(std::vector<std::string> args) {
  std::vector<char*> ptrs;
  for (auto& s : args) ptrs.push_back(s.data());
  ptrs.push_back(nullptr);
  return run(static_cast<int>(args.size()), ptrs.data());
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.empty()) args.push_back("hpdesign");

  // Config file values are spliced in ahead of parsing.
  for (std::size_t i = 1; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      std::string path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      try {
        auto extra = detail::config_arguments(path, args);
        args.insert(args.end(), extra.begin(), extra.end());
      } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
      }
      break;
    }
  }

  CLI::App app{"HP lattice protein design and quantum annealing simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  unsigned threads = 0;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--config", "key=value file mirroring the flags");

  auto add_common = [&](CLI::App* cmd, bool seeded) {
    cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    if (seeded) cmd->add_option("--seed", seed, "random seed")->envname("HPDESIGN_SEED")->capture_default_str();
  };

  int enum_n = 0;
  bool enum_designability = false;
  int enum_limit = kDefaultDesignabilityLimit;
  auto* c_enum = app.add_subcommand("enumerate", "enumerate structures (and rank by designability)");
  c_enum->add_option("--n", enum_n, "chain length")->required();
  c_enum->add_flag("--designability", enum_designability, "also compute designability");
  c_enum->add_option("--designability-limit", enum_limit, "largest N")->capture_default_str();
  add_common(c_enum, false);

  SystemArgs design_sys;
  design_sys.lambda = "2.5";
  std::string solver = "exact";
  int budget = 10;
  DesignOptions design_opts;
  auto* c_design = app.add_subcommand("design", "optimize sequences for a target and filter by folding");
  add_system_options(c_design, design_sys, false);
  c_design->add_option("--solver", solver, "exact | sa | schrodinger")->capture_default_str();
  c_design->add_option("--budget", budget, "SA restarts or Schrodinger reads")->capture_default_str();
  c_design->add_option("--sa-steps", design_opts.sa.steps, "Metropolis steps per restart")->capture_default_str();
  c_design->add_option("--tf", design_opts.t_f, "annealing time (schrodinger)")->capture_default_str();
  c_design->add_option("--eps", design_opts.eps, "time step (schrodinger)")->capture_default_str();
  c_design->add_option("--fold-limit", design_opts.fold_limit, "largest N folded exactly")->capture_default_str();
  add_common(c_design, true);

  SystemArgs sim_sys;
  SimulateArgs sim;
  double sim_sign = 0.0;
  auto* c_sim = app.add_subcommand("simulate", "integrate the annealing Schrodinger equation");
  add_system_options(c_sim, sim_sys, true);
  c_sim->add_option("--driver", sim.driver, "x | xy")->capture_default_str();
  c_sim->add_option("--tf", sim.t_f, "annealing time")->capture_default_str();
  c_sim->add_option("--eps", sim.eps, "time step")->capture_default_str();
  c_sim->add_flag("--trace", sim.trace, "write trace.csv");
  c_sim->add_option("--trace-every", sim.trace_every, "trace stride in steps")->capture_default_str();
  c_sim->add_option("--reads", sim.reads, "sample this many bitstrings")->capture_default_str();
  c_sim->add_flag("--subspace", sim.subspace, "XY driver: evolve in the fixed-weight sector only");
  auto* sim_sign_opt = c_sim->add_option("--driver-sign", sim_sign, "+1 or -1");
  add_common(c_sim, true);

  SystemArgs chi_sys;
  std::string chi_driver = "x";
  std::vector<double> chi_tf = {10.0, 50.0};
  std::vector<double> chi_eps = {0.4, 0.2, 0.1, 0.05, 0.025};
  double chi_sign = 0.0;
  auto* c_chi = app.add_subcommand("chi", "integrator order diagnostic");
  add_system_options(c_chi, chi_sys, true);
  c_chi->add_option("--driver", chi_driver, "x | xy")->capture_default_str();
  c_chi->add_option("--tf", chi_tf, "annealing times")->delimiter(',')->capture_default_str();
  c_chi->add_option("--eps-list", chi_eps, "step sizes, successive factors of 2")->delimiter(',')->capture_default_str();
  auto* chi_sign_opt = c_chi->add_option("--driver-sign", chi_sign, "+1 or -1");
  add_common(c_chi, false);

  SystemArgs noise_sys;
  NoiseArgs noise;
  auto* c_noise = app.add_subcommand("noise", "control-noise ensembles");
  add_system_options(c_noise, noise_sys, true);
  c_noise->add_option("--x", noise.x, "noise strengths")->delimiter(',')->capture_default_str();
  c_noise->add_option("--k", noise.k, "physical qubits per logical qubit")->capture_default_str();
  c_noise->add_option("--jcs", noise.jcs, "chain strengths")->delimiter(',')->capture_default_str();
  c_noise->add_option("--samples", noise.samples, "perturbed Hamiltonians per point")->capture_default_str();
  c_noise->add_option("--sweep", noise.sweep, "none | jcs | x | n")->capture_default_str();
  c_noise->add_option("--min-gap", noise.min_gap, "n sweep: smallest gap kept")->capture_default_str();
  add_common(c_noise, true);

  SystemArgs ising_sys;
  auto* c_ising = app.add_subcommand("ising", "export the Ising form of a design problem");
  add_system_options(c_ising, ising_sys, false);
  add_common(c_ising, false);

  std::string manifest_path;
  auto* c_rerun = app.add_subcommand("rerun", "repeat a run from its manifest");
  c_rerun->add_option("--manifest", manifest_path, "manifest.json of the earlier run")->required();
  add_common(c_rerun, false);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    set_thread_count(threads);
    if (c_rerun->parsed()) {
      std::ifstream in(manifest_path);
      if (!in) throw Error(Errc::ParseError, "cannot open " + manifest_path);
      json m = json::parse(in);
      std::vector<std::string> replay = {args[0], m.at("command").get<std::string>()};
      for (const auto& a : m.at("argv")) replay.push_back(a.get<std::string>());
      replay.push_back("--out");
      replay.push_back(out_dir);
      replay.push_back("--threads");
      replay.push_back(std::to_string(threads));
      return run(replay);
    }

    RunContext ctx;
    ctx.out_dir = out_dir;
    fs::create_directories(ctx.out_dir);
    const std::set<std::string> skip = {"--out", "--threads", "--seed"};
    int rc = kOk;
    if (c_enum->parsed()) {
      ctx.command = "enumerate";
      rc = cmd_enumerate(ctx, enum_n, enum_designability, enum_limit);
      ctx.write_manifest(record(c_enum, skip), std::nullopt);
    } else if (c_design->parsed()) {
      ctx.command = "design";
      auto rec = record(c_design, skip);
      rec.argv.push_back("--seed");
      rec.argv.push_back(std::to_string(seed));
      rc = cmd_design(ctx, design_sys, solver, budget, seed, design_opts);
      ctx.write_manifest(rec, seed);
    } else if (c_sim->parsed()) {
      ctx.command = "simulate";
      if (sim_sign_opt->count()) sim.driver_sign = sim_sign;
      auto rec = record(c_sim, skip);
      rec.argv.push_back("--seed");
      rec.argv.push_back(std::to_string(seed));
      rc = cmd_simulate(ctx, sim_sys, sim, seed);
      ctx.write_manifest(rec, seed);
    } else if (c_chi->parsed()) {
      ctx.command = "chi";
      std::optional<double> sign;
      if (chi_sign_opt->count()) sign = chi_sign;
      rc = cmd_chi(ctx, chi_sys, chi_driver, chi_tf, chi_eps, sign);
      ctx.write_manifest(record(c_chi, skip), std::nullopt);
    } else if (c_noise->parsed()) {
      ctx.command = "noise";
      auto rec = record(c_noise, skip);
      rec.argv.push_back("--seed");
      rec.argv.push_back(std::to_string(seed));
      rc = cmd_noise(ctx, noise_sys, noise, seed);
      ctx.write_manifest(rec, seed);
    } else if (c_ising->parsed()) {
      ctx.command = "ising";
      rc = cmd_ising(ctx, ising_sys);
      ctx.write_manifest(record(c_ising, skip), std::nullopt);
    }
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace hpdesign::cli
