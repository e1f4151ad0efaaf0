#pragma once

// Two-step sequence design: minimize the design energy in a target
// structure, then keep the candidates that actually fold into it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hpdesign/anneal.hpp"
#include "hpdesign/enumeration.hpp"
#include "hpdesign/error.hpp"
#include "hpdesign/ising.hpp"
#include "hpdesign/lattice.hpp"
#include "hpdesign/min_ehp.hpp"
#include "hpdesign/parallel.hpp"
#include "hpdesign/random.hpp"

namespace hpdesign {

enum class SolverChoice { Exact, SA, Schrodinger };

inline const char* solver_name(SolverChoice s) {
  switch (s) {
    case SolverChoice::Exact: return "EXACT";
    case SolverChoice::SA: return "SA";
    case SolverChoice::Schrodinger: return "SCHRODINGER";
  }
  return "?";
}

inline SolverChoice parse_solver(const std::string& name) {
  if (name == "exact" || name == "EXACT") return SolverChoice::Exact;
  if (name == "sa" || name == "SA") return SolverChoice::SA;
  if (name == "schrodinger" || name == "SCHRODINGER") return SolverChoice::Schrodinger;
  throw Error(Errc::InvalidArgument, "unknown solver '" + name + "'");
}

enum class Verdict { UniqueGs, DegenerateGs, BetterElsewhere, Unverified };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::UniqueGs: return "UNIQUE_GS";
    case Verdict::DegenerateGs: return "DEGENERATE_GS";
    case Verdict::BetterElsewhere: return "BETTER_ELSEWHERE";
    case Verdict::Unverified: return "UNVERIFIED";
  }
  return "?";
}

struct DesignVerdict {
  HpSequence sequence;
  int ehp = 0;  // E_HP in the target
  Verdict verdict = Verdict::Unverified;
  std::optional<FoldResult> evidence;
};

struct DesignReport {
  std::string target;  // move-string as given
  int n_h = 0;
  Rational lambda{0};
  SolverChoice solver = SolverChoice::Exact;
  std::vector<DesignVerdict> candidates;  // sorted by sequence text
  int oracle_min_ehp = 0;
  std::uint64_t oracle_degeneracy = 0;
  /// Solver outputs rejected because they miss the oracle minimum.
  std::vector<HpSequence> flagged;

  std::size_t count(Verdict v) const {
    return static_cast<std::size_t>(
        std::count_if(candidates.begin(), candidates.end(), [v](const DesignVerdict& c) { return c.verdict == v; }));
  }
};

struct SaConfig {
  std::int64_t steps = 100000;
  double t_start = 2.0;
  double t_end = 0.02;
};

struct SaResult {
  std::vector<Rational> restart_best_energy;
  std::vector<HpSequence> restart_best;
  Rational best_energy{0};
  std::vector<HpSequence> best;  // distinct, sorted
};

namespace detail {

struct SaState {
  std::vector<std::uint8_t> bead;
  std::vector<int> h_neighbours;
  std::vector<int> h_list, p_list, slot;
  int n_h = 0;
  std::int64_t hh = 0;
};

}  // namespace detail

/// Metropolis annealing on the design energy. Each restart draws from its
/// own stream of `seed`; moves are single flips or H/P swaps with equal
/// probability; temperature falls geometrically from t_start to t_end.
inline SaResult sa_minimize(const DesignEnergyModel& model, int restarts, std::uint64_t seed, const SaConfig& config = {}) {
  if (config.steps < 1) throw Error(Errc::InvalidArgument, "steps must be >= 1");
  if (restarts < 1) throw Error(Errc::InvalidArgument, "restarts must be >= 1");
  if (!(config.t_start > 0) || !(config.t_end > 0)) throw Error(Errc::InvalidArgument, "temperatures must be positive");
  const int n = model.size();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [i, j] : model.cmap.pairs()) {
    adj[static_cast<std::size_t>(i)].push_back(j);
    adj[static_cast<std::size_t>(j)].push_back(i);
  }
  // Integer energies: D * E = -D * hh + L * (n_h - N_H)^2 with L = D * lambda.
  const std::int64_t den = model.lambda.denominator();
  const std::int64_t lam = model.lambda.numerator();
  const double unit = 1.0 / static_cast<double>(den);
  auto scaled = [&](std::int64_t hh, int count) {
    std::int64_t d = count - model.n_h;
    return -den * hh + lam * d * d;
  };

  SaResult result;
  result.restart_best_energy.resize(static_cast<std::size_t>(restarts));
  result.restart_best.resize(static_cast<std::size_t>(restarts));
  std::vector<std::int64_t> best_scaled(static_cast<std::size_t>(restarts));

  parallel_for(
      static_cast<std::size_t>(restarts),
      [&](std::size_t r) {
        StreamRng rng(seed, r);
        detail::SaState st;
        st.bead.assign(static_cast<std::size_t>(n), 0);
        st.h_neighbours.assign(static_cast<std::size_t>(n), 0);
        st.slot.assign(static_cast<std::size_t>(n), 0);
        // Start from a random placement at the target composition.
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        for (int i = 0; i < model.n_h; ++i) st.bead[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = 1;
        for (int v = 0; v < n; ++v) {
          auto& list = st.bead[static_cast<std::size_t>(v)] ? st.h_list : st.p_list;
          st.slot[static_cast<std::size_t>(v)] = static_cast<int>(list.size());
          list.push_back(v);
          for (int u : adj[static_cast<std::size_t>(v)]) st.h_neighbours[static_cast<std::size_t>(u)] += st.bead[static_cast<std::size_t>(v)];
        }
        st.n_h = model.n_h;
        for (auto [i, j] : model.cmap.pairs()) st.hh += st.bead[static_cast<std::size_t>(i)] & st.bead[static_cast<std::size_t>(j)];

        auto set_bead = [&](int v, std::uint8_t value) {
          auto& from = value ? st.p_list : st.h_list;
          auto& to = value ? st.h_list : st.p_list;
          int pos = st.slot[static_cast<std::size_t>(v)];
          int last = from.back();
          from[static_cast<std::size_t>(pos)] = last;
          st.slot[static_cast<std::size_t>(last)] = pos;
          from.pop_back();
          st.slot[static_cast<std::size_t>(v)] = static_cast<int>(to.size());
          to.push_back(v);
          st.bead[static_cast<std::size_t>(v)] = value;
          int delta = value ? 1 : -1;
          for (int u : adj[static_cast<std::size_t>(v)]) st.h_neighbours[static_cast<std::size_t>(u)] += delta;
          st.n_h += delta;
        };

        std::int64_t energy = scaled(st.hh, st.n_h);
        std::int64_t best = energy;
        std::vector<std::uint8_t> best_beads = st.bead;
        const double ratio = config.steps > 1 ? std::pow(config.t_end / config.t_start, 1.0 / static_cast<double>(config.steps - 1)) : 1.0;
        double temperature = config.t_start;
        for (std::int64_t step = 0; step < config.steps; ++step, temperature *= ratio) {
          bool swap_move = rng.uniform() < 0.5 && !st.h_list.empty() && !st.p_list.empty();
          if (swap_move) {
            int i = st.h_list[rng.below(st.h_list.size())];
            int j = st.p_list[rng.below(st.p_list.size())];
            bool touching = std::find(adj[static_cast<std::size_t>(i)].begin(), adj[static_cast<std::size_t>(i)].end(), j) !=
                            adj[static_cast<std::size_t>(i)].end();
            std::int64_t dhh = st.h_neighbours[static_cast<std::size_t>(j)] - (touching ? 1 : 0) - st.h_neighbours[static_cast<std::size_t>(i)];
            std::int64_t delta = -den * dhh;
            if (delta <= 0 || rng.uniform() < std::exp(-static_cast<double>(delta) * unit / temperature)) {
              set_bead(i, 0);
              set_bead(j, 1);
              st.hh += dhh;
              energy += delta;
            }
          } else {
            int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            bool to_h = st.bead[static_cast<std::size_t>(v)] == 0;
            std::int64_t dhh = to_h ? st.h_neighbours[static_cast<std::size_t>(v)] : -st.h_neighbours[static_cast<std::size_t>(v)];
            std::int64_t delta = scaled(st.hh + dhh, st.n_h + (to_h ? 1 : -1)) - energy;
            if (delta <= 0 || rng.uniform() < std::exp(-static_cast<double>(delta) * unit / temperature)) {
              set_bead(v, to_h ? 1 : 0);
              st.hh += dhh;
              energy += delta;
            }
          }
          if (energy < best) {
            best = energy;
            best_beads = st.bead;
          }
        }
        best_scaled[r] = best;
        result.restart_best[r] = HpSequence(best_beads);
        result.restart_best_energy[r] = Rational(best, den);
      },
      1);

  std::int64_t global = *std::min_element(best_scaled.begin(), best_scaled.end());
  result.best_energy = Rational(global, den);
  for (std::size_t r = 0; r < best_scaled.size(); ++r) {
    if (best_scaled[r] == global) result.best.push_back(result.restart_best[r]);
  }
  std::sort(result.best.begin(), result.best.end(), [](const HpSequence& a, const HpSequence& b) { return a.str() < b.str(); });
  result.best.erase(std::unique(result.best.begin(), result.best.end()), result.best.end());
  return result;
}

struct DesignOptions {
  SaConfig sa;
  double t_f = 20.0;
  double eps = 0.01;
  Driver driver = Driver::X;
  int fold_limit = kDefaultStructureLimit;
};

struct OptimizeResult {
  std::vector<HpSequence> sequences;  // at the oracle minimum, sorted, distinct
  std::vector<HpSequence> flagged;    // solver output that missed it
  MinEhpSolution oracle;
};

namespace detail {

inline void sort_unique(std::vector<HpSequence>& v) {
  std::sort(v.begin(), v.end(), [](const HpSequence& a, const HpSequence& b) { return a.str() < b.str(); });
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

inline OptimizeResult optimize_sequences(const LatticeStructure& target, int n_h, Rational lambda, SolverChoice solver,
                                         int budget, std::uint64_t seed, const DesignOptions& options = {}) {
  const int n = static_cast<int>(target.size());
  DesignEnergyModel model(contact_map(target), lambda, n_h);
  OptimizeResult out;
  out.oracle = min_ehp_oracle(model.cmap, n_h);

  std::vector<HpSequence> raw;
  switch (solver) {
    case SolverChoice::Exact: {
      if (n > kMaxSpectrumSpins) throw Error(Errc::SolverCapExceeded, "exact solver limited to 24 beads");
      auto spec = spectrum(to_ising(model));
      for (auto s : spec.ground_states) raw.push_back(HpSequence::from_mask(s, n));
      break;
    }
    case SolverChoice::SA: {
      raw = sa_minimize(model, budget, seed, options.sa).best;
      break;
    }
    case SolverChoice::Schrodinger: {
      if (n > kMaxSimulatedQubits) throw Error(Errc::SolverCapExceeded, "Schrodinger solver limited to 20 beads");
      if (budget < 1) throw Error(Errc::InvalidArgument, "budget must be >= 1");
      IntegratorConfig cfg;
      cfg.eps = options.eps;
      auto psi = evolve(to_float(to_ising(model)), options.driver, AnnealSchedule(options.t_f), cfg, n_h);
      for (auto s : sample_bitstrings(psi, static_cast<std::size_t>(budget), seed)) raw.push_back(HpSequence::from_mask(s, n));
      break;
    }
  }
  detail::sort_unique(raw);
  for (auto& s : raw) {
    bool hit = s.n_h() == n_h && hp_energy(model.cmap, s) == out.oracle.min_ehp;
    (hit ? out.sequences : out.flagged).push_back(std::move(s));
  }
  return out;
}

/// Folds every candidate exactly and classifies it against the target.
inline std::vector<DesignVerdict> filter_by_folding(std::vector<HpSequence> candidates, const LatticeStructure& target,
                                                    int fold_limit = kDefaultStructureLimit) {
  detail::sort_unique(candidates);
  const int n = static_cast<int>(target.size());
  const auto cmap = contact_map(target);
  const std::string canonical = canonicalize(target).moves();
  const bool verifiable = n >= 1 && n <= fold_limit && n <= kMaxIndexedBeads;
  std::shared_ptr<const StructureIndex> index;
  if (verifiable) index = structure_index(n, fold_limit);

  std::vector<DesignVerdict> out(candidates.size());
  parallel_for(
      candidates.size(),
      [&](std::size_t k) {
        auto& v = out[k];
        v.sequence = candidates[k];
        v.ehp = hp_energy(cmap, v.sequence);
        if (!verifiable) {
          v.verdict = Verdict::Unverified;
          return;
        }
        v.evidence = index->fold(v.sequence.mask());
        const auto& fold = *v.evidence;
        if (fold.min_ehp < v.ehp) {
          v.verdict = Verdict::BetterElsewhere;
        } else if (fold.unique && fold.ground_states.front().moves() == canonical) {
          v.verdict = Verdict::UniqueGs;
        } else {
          v.verdict = Verdict::DegenerateGs;
        }
      },
      1);
  return out;
}

inline DesignReport design(const LatticeStructure& target, int n_h, Rational lambda, SolverChoice solver, int budget,
                           std::uint64_t seed, const DesignOptions& options = {}) {
  auto opt = optimize_sequences(target, n_h, lambda, solver, budget, seed, options);
  DesignReport report;
  report.target = target.moves();
  report.n_h = n_h;
  report.lambda = lambda;
  report.solver = solver;
  report.oracle_min_ehp = opt.oracle.min_ehp;
  report.oracle_degeneracy = opt.oracle.degeneracy;
  report.flagged = std::move(opt.flagged);
  report.candidates = filter_by_folding(std::move(opt.sequences), target, options.fold_limit);
  return report;
}

}  // namespace hpdesign
