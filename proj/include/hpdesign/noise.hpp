#pragma once

// Gaussian control errors on the logical Ising problem and the ensemble
// fraction whose perturbed ground state stays inside the unperturbed ground
// set.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hpdesign/error.hpp"
#include "hpdesign/ising.hpp"
#include "hpdesign/parallel.hpp"
#include "hpdesign/random.hpp"

namespace hpdesign {

inline constexpr double kNoiseTieTolerance = 1e-12;

struct NoiseSpec {
  double x = 0.015;  // noise strength
  int k = 1;         // physical qubits per logical qubit
  double j_cs = 1.0; // chain strength

  void validate() const {
    if (!(x >= 0)) throw Error(Errc::InvalidArgument, "noise strength x must be >= 0");
    if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
    if (!(j_cs > 0)) throw Error(Errc::NonpositiveParameter, "j_cs must be positive");
  }
};

struct NoiseSigmas {
  double h = 0.0;
  double j = 0.0;
};

inline NoiseSigmas noise_sigmas(const NoiseSpec& spec, double max_abs_h) {
  if (!(max_abs_h >= 0)) throw Error(Errc::InvalidArgument, "max|h| must be >= 0");
  return {spec.x * max_abs_h / std::sqrt(static_cast<double>(spec.k)), spec.x * spec.j_cs};
}

/// One perturbed copy of the logical problem. Stream `sample` of `seed`
/// supplies the draws: all fields first, then couplers (i<j) in row order.
inline IsingProblemF perturb(const IsingProblemF& problem, const NoiseSpec& spec, std::uint64_t seed,
                             std::uint64_t sample = 0) {
  spec.validate();
  auto sig = noise_sigmas(spec, problem.max_abs_field());
  IsingProblemF out = problem;
  StreamRng rng(seed, sample);
  for (int a = 0; a < problem.n; ++a) out.h[static_cast<std::size_t>(a)] += sig.h * rng.gaussian();
  for (int a = 0; a < problem.n; ++a) {
    for (int b = a + 1; b < problem.n; ++b) out.coupler(a, b) += sig.j * rng.gaussian();
  }
  return out;
}

inline IsingProblemF perturb(const IsingProblem& problem, const NoiseSpec& spec, std::uint64_t seed,
                             std::uint64_t sample = 0) {
  return perturb(to_float(problem), spec, seed, sample);
}

struct NoiseEnsembleResult {
  std::uint64_t samples = 0;
  std::uint64_t successes = 0;
  double p_g = 0.0;
  std::uint64_t seed = 0;
  NoiseSpec spec;

  /// Normal-approximation 95% half-width.
  double ci95() const {
    if (samples == 0) return 0.0;
    return 1.96 * std::sqrt(p_g * (1.0 - p_g) / static_cast<double>(samples));
  }
};

namespace detail {

/// True iff every state within the tie tolerance of the global minimum is in
/// the ground set (given as a 2^n membership table).
inline bool minimizers_inside(const IsingProblemF& p, std::span<const std::uint8_t> inside) {
  const int n = p.n;
  std::vector<double> coupling(static_cast<std::size_t>(n * n), 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double v = p.coupler(a, b);
      coupling[static_cast<std::size_t>(a * n + b)] = v;
      coupling[static_cast<std::size_t>(b * n + a)] = v;
    }
  }
  std::uint64_t s = 0;
  double e = p.energy(0);
  std::vector<double> field(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) field[static_cast<std::size_t>(a)] = p.local_field(0, a);
  double best_in = std::numeric_limits<double>::infinity();
  double best_out = std::numeric_limits<double>::infinity();
  auto visit = [&] {
    if (inside[s]) best_in = std::min(best_in, e);
    else best_out = std::min(best_out, e);
  };
  visit();
  const std::uint64_t states = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < states; ++g) {
    int a = std::countr_zero(g);
    double sa = (s >> a & 1u) ? 1.0 : -1.0;
    e -= 2.0 * sa * field[static_cast<std::size_t>(a)];
    s ^= std::uint64_t{1} << a;
    const double* row = &coupling[static_cast<std::size_t>(a * n)];
    const double step = 2.0 * sa;
    for (int b = 0; b < n; ++b) field[static_cast<std::size_t>(b)] -= step * row[b];
    visit();
  }
  return best_out - best_in > kNoiseTieTolerance;
}

}  // namespace detail

/// Fraction of `samples` perturbed Hamiltonians whose minimizer set lies in
/// the exact ground set of the unperturbed problem.
inline NoiseEnsembleResult ground_state_overlap_rate(const IsingProblem& problem, const NoiseSpec& spec,
                                                     std::uint64_t samples, std::uint64_t seed) {
  spec.validate();
  if (problem.n > kMaxSpectrumSpins) throw Error(Errc::TooLarge, "noise scan limited to 24 spins");
  if (samples < 1) throw Error(Errc::InvalidArgument, "samples must be >= 1");
  auto exact = spectrum(problem);
  std::vector<std::uint8_t> inside(std::size_t{1} << problem.n, 0);
  for (auto g : exact.ground_states) inside[g] = 1;
  const IsingProblemF base = to_float(problem);

  std::vector<std::uint8_t> ok(samples, 0);
  parallel_for(
      samples,
      [&](std::size_t i) { ok[i] = detail::minimizers_inside(perturb(base, spec, seed, i), inside) ? 1 : 0; },
      std::max<std::size_t>(1, std::size_t{1} << std::max(0, 16 - problem.n)));
  NoiseEnsembleResult r;
  r.samples = samples;
  r.successes = static_cast<std::uint64_t>(std::count(ok.begin(), ok.end(), std::uint8_t{1}));
  r.p_g = static_cast<double>(r.successes) / static_cast<double>(samples);
  r.seed = seed;
  r.spec = spec;
  return r;
}

/// One ensemble per chain strength. All entries reuse the same seed, so the
/// underlying standard normals are shared and only their scale changes.
inline std::vector<NoiseEnsembleResult> jcs_sweep(const IsingProblem& problem, double x, int k,
                                                  std::span<const double> jcs_list, std::uint64_t samples,
                                                  std::uint64_t seed) {
  std::vector<NoiseEnsembleResult> out;
  out.reserve(jcs_list.size());
  for (double j : jcs_list) out.push_back(ground_state_overlap_rate(problem, NoiseSpec{x, k, j}, samples, seed));
  return out;
}

struct NoiseSystem {
  int n = 0;
  IsingProblem problem;
  NoiseSpec spec;
};

struct NSweepResult {
  std::vector<NoiseEnsembleResult> rows;
  /// Least-squares slope of ln p_g against N over rows with p_g > 0; absent
  /// with fewer than two such rows or a single distinct N.
  std::optional<double> log_slope;
};

inline std::optional<double> least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

inline NSweepResult n_sweep(std::span<const NoiseSystem> systems, std::uint64_t samples, std::uint64_t seed) {
  NSweepResult out;
  std::vector<double> xs, ys;
  for (const auto& sys : systems) {
    out.rows.push_back(ground_state_overlap_rate(sys.problem, sys.spec, samples, seed));
    if (out.rows.back().p_g > 0) {
      xs.push_back(static_cast<double>(sys.n));
      ys.push_back(std::log(out.rows.back().p_g));
    }
  }
  out.log_slope = least_squares_slope(xs, ys);
  return out;
}

}  // namespace hpdesign
