#pragma once

// QUBO and Ising forms of the design energy, device-style rescaling, and
// exact spectra.
//
// Spin convention: s_i = (1 + sigma_i) / 2, so H <-> sigma = +1 <-> bit 1.
// A state is a mask whose bit i is s_i.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "hpdesign/error.hpp"
#include "hpdesign/lattice.hpp"
#include "hpdesign/parallel.hpp"
#include "hpdesign/rational.hpp"

namespace hpdesign {

inline constexpr int kMaxSpectrumSpins = 24;

/// E(s) = sum_i Q_ii s_i + sum_{i<j} Q_ij s_i s_j + offset, s in {0,1}^n.
/// Q is symmetric in storage; each unordered pair's coefficient appears once
/// in the energy.
struct QuboProblem {
  int n = 0;
  std::vector<Rational> q;  // n*n, symmetric
  Rational offset{0};

  explicit QuboProblem(int size = 0) : n(size), q(static_cast<std::size_t>(size * size), Rational(0)) {}

  Rational& at(int i, int j) { return q[static_cast<std::size_t>(i * n + j)]; }
  const Rational& at(int i, int j) const { return q[static_cast<std::size_t>(i * n + j)]; }
  void set(int i, int j, Rational v) {
    at(i, j) = v;
    at(j, i) = v;
  }

  Rational energy(std::uint64_t s) const {
    Rational e = offset;
    for (int i = 0; i < n; ++i) {
      if (!(s >> i & 1u)) continue;
      e += at(i, i);
      for (int j = i + 1; j < n; ++j) {
        if (s >> j & 1u) e += at(i, j);
      }
    }
    return e;
  }
};

/// E(sigma) = sum_i h_i sigma_i + sum_{i<j} J_ij sigma_i sigma_j + offset.
template <class Scalar>
struct BasicIsing {
  int n = 0;
  std::vector<Scalar> h;
  std::vector<Scalar> j;  // n*n, only i < j entries are used
  Scalar offset{0};

  explicit BasicIsing(int size = 0)
      : n(size), h(static_cast<std::size_t>(size), Scalar(0)), j(static_cast<std::size_t>(size * size), Scalar(0)) {}

  Scalar& coupler(int a, int b) {
    if (a > b) std::swap(a, b);
    return j[static_cast<std::size_t>(a * n + b)];
  }
  const Scalar& coupler(int a, int b) const {
    if (a > b) std::swap(a, b);
    return j[static_cast<std::size_t>(a * n + b)];
  }

  Scalar energy(std::uint64_t s) const {
    Scalar e = offset;
    for (int a = 0; a < n; ++a) {
      int sa = (s >> a & 1u) ? 1 : -1;
      e += h[static_cast<std::size_t>(a)] * Scalar(sa);
      for (int b = a + 1; b < n; ++b) {
        int sb = (s >> b & 1u) ? 1 : -1;
        e += j[static_cast<std::size_t>(a * n + b)] * Scalar(sa * sb);
      }
    }
    return e;
  }

  Scalar local_field(std::uint64_t s, int a) const {
    Scalar f = h[static_cast<std::size_t>(a)];
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      f += coupler(a, b) * Scalar((s >> b & 1u) ? 1 : -1);
    }
    return f;
  }

  Scalar max_abs_field() const {
    Scalar m(0);
    for (const auto& v : h) m = std::max(m, v < Scalar(0) ? -v : v);
    return m;
  }
};

using IsingProblem = BasicIsing<Rational>;
using IsingProblemF = BasicIsing<double>;

inline IsingProblemF to_float(const IsingProblem& p) {
  IsingProblemF f(p.n);
  for (std::size_t k = 0; k < p.h.size(); ++k) f.h[k] = to_double(p.h[k]);
  for (std::size_t k = 0; k < p.j.size(); ++k) f.j[k] = to_double(p.j[k]);
  f.offset = to_double(p.offset);
  return f;
}

inline QuboProblem to_qubo(const DesignEnergyModel& model) {
  const int n = model.size();
  const Rational lambda = model.lambda;
  QuboProblem qubo(n);
  for (int i = 0; i < n; ++i) {
    qubo.at(i, i) = lambda * Rational(1 - 2 * model.n_h);
    for (int k = i + 1; k < n; ++k) qubo.set(i, k, Rational(2) * lambda);
  }
  for (auto [i, k] : model.cmap.pairs()) qubo.set(i, k, qubo.at(i, k) - Rational(1));
  qubo.offset = lambda * Rational(static_cast<std::int64_t>(model.n_h) * model.n_h);
  return qubo;
}

inline IsingProblem qubo_to_ising(const QuboProblem& qubo) {
  const int n = qubo.n;
  IsingProblem ising(n);
  ising.offset = qubo.offset;
  for (int i = 0; i < n; ++i) {
    ising.h[static_cast<std::size_t>(i)] += qubo.at(i, i) / Rational(2);
    ising.offset += qubo.at(i, i) / Rational(2);
    for (int k = i + 1; k < n; ++k) {
      Rational quarter = qubo.at(i, k) / Rational(4);
      ising.coupler(i, k) = quarter;
      ising.h[static_cast<std::size_t>(i)] += quarter;
      ising.h[static_cast<std::size_t>(k)] += quarter;
      ising.offset += quarter;
    }
  }
  return ising;
}

inline IsingProblem to_ising(const DesignEnergyModel& model) { return qubo_to_ising(to_qubo(model)); }

struct Rescaled {
  IsingProblemF problem;
  double r = 1.0;
};

/// Device rescaling with r = j_cs / j_max: every field, coupler and the
/// offset are divided by r.
template <class Scalar>
Rescaled rescale(const BasicIsing<Scalar>& p, double j_cs, double j_max = 1.0) {
  if (!(j_cs > 0) || !(j_max > 0)) throw Error(Errc::NonpositiveParameter, "j_cs and j_max must be positive");
  Rescaled out{IsingProblemF(p.n), j_cs / j_max};
  auto as_double = [](const Scalar& v) {
    if constexpr (std::is_same_v<Scalar, Rational>) return to_double(v);
    else return static_cast<double>(v);
  };
  for (std::size_t k = 0; k < p.h.size(); ++k) out.problem.h[k] = as_double(p.h[k]) / out.r;
  for (std::size_t k = 0; k < p.j.size(); ++k) out.problem.j[k] = as_double(p.j[k]) / out.r;
  out.problem.offset = as_double(p.offset) / out.r;
  return out;
}

/// Integer form of an exact Ising problem: every coefficient times a common
/// denominator. Energies of this form are exact int64 values.
struct ScaledIsing {
  int n = 0;
  std::int64_t denominator = 1;
  std::vector<std::int64_t> h;
  std::vector<std::int64_t> j;
  std::int64_t offset = 0;

  explicit ScaledIsing(const IsingProblem& p) : n(p.n) {
    for (const auto& v : p.h) denominator = std::lcm(denominator, v.denominator());
    for (const auto& v : p.j) denominator = std::lcm(denominator, v.denominator());
    denominator = std::lcm(denominator, p.offset.denominator());
    auto scale = [&](const Rational& v) { return v.numerator() * (denominator / v.denominator()); };
    for (const auto& v : p.h) h.push_back(scale(v));
    for (const auto& v : p.j) j.push_back(scale(v));
    offset = scale(p.offset);
  }

  std::int64_t energy(std::uint64_t s) const {
    std::int64_t e = offset;
    for (int a = 0; a < n; ++a) {
      std::int64_t sa = (s >> a & 1u) ? 1 : -1;
      e += h[static_cast<std::size_t>(a)] * sa;
      for (int b = a + 1; b < n; ++b) {
        std::int64_t sb = (s >> b & 1u) ? 1 : -1;
        e += j[static_cast<std::size_t>(a * n + b)] * sa * sb;
      }
    }
    return e;
  }

  /// Local field f_a = h_a + sum_b J_ab sigma_b; flipping spin a changes the
  /// energy by -2 sigma_a f_a.
  std::int64_t local_field(std::uint64_t s, int a) const {
    std::int64_t f = h[static_cast<std::size_t>(a)];
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      std::int64_t sb = (s >> b & 1u) ? 1 : -1;
      f += j[static_cast<std::size_t>(std::min(a, b) * n + std::max(a, b))] * sb;
    }
    return f;
  }
};

/// Visits every state of one block of 2^n in Gray-code order, keeping the
/// energy up to date incrementally. Visit receives (state, energy).
template <class Coeffs, class Energy, class Visit>
void gray_scan(const Coeffs& p, std::uint64_t block_start, int block_bits, Visit&& visit) {
  const int n = p.n;
  std::uint64_t s = block_start;
  Energy e = p.energy(s);
  std::vector<Energy> field(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) field[static_cast<std::size_t>(a)] = p.local_field(s, a);
  visit(s, e);
  const std::uint64_t steps = std::uint64_t{1} << block_bits;
  for (std::uint64_t g = 1; g < steps; ++g) {
    int a = std::countr_zero(g);
    Energy sa = (s >> a & 1u) ? Energy(1) : Energy(-1);
    e -= Energy(2) * sa * field[static_cast<std::size_t>(a)];
    s ^= std::uint64_t{1} << a;
    // sigma_a flipped from sa to -sa: every other local field moves by -2 sa J_ab.
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      field[static_cast<std::size_t>(b)] -= Energy(2) * sa * p.j[static_cast<std::size_t>(std::min(a, b) * n + std::max(a, b))];
    }
    visit(s, e);
  }
}

struct SpectrumSummary {
  Rational ground_energy{0};
  std::vector<std::uint64_t> ground_states;  // ascending
  Rational gap{0};
};

/// Exhaustive exact scan of all 2^n states.
inline SpectrumSummary spectrum(const IsingProblem& p) {
  if (p.n > kMaxSpectrumSpins) throw Error(Errc::TooLarge, "spectrum scan limited to 24 spins");
  ScaledIsing scaled(p);
  const int n = p.n;
  const int block_bits = std::min(n, 14);
  const std::size_t blocks = std::size_t{1} << (n - block_bits);
  struct Partial {
    std::int64_t lowest = std::numeric_limits<std::int64_t>::max();
    std::int64_t second = std::numeric_limits<std::int64_t>::max();
    std::vector<std::uint64_t> states;
  };
  std::vector<Partial> partials(blocks);
  parallel_for(
      blocks,
      [&](std::size_t b) {
        auto& part = partials[b];
        gray_scan<ScaledIsing, std::int64_t>(scaled, static_cast<std::uint64_t>(b) << block_bits, block_bits,
                                             [&](std::uint64_t s, std::int64_t e) {
                                               if (e < part.lowest) {
                                                 part.second = part.lowest;
                                                 part.lowest = e;
                                                 part.states.assign(1, s);
                                               } else if (e == part.lowest) {
                                                 part.states.push_back(s);
                                               } else if (e < part.second) {
                                                 part.second = e;
                                               }
                                             });
      },
      1);

  std::int64_t lowest = std::numeric_limits<std::int64_t>::max();
  for (const auto& part : partials) lowest = std::min(lowest, part.lowest);
  std::int64_t second = std::numeric_limits<std::int64_t>::max();
  SpectrumSummary out;
  for (const auto& part : partials) {
    if (part.lowest == lowest) {
      out.ground_states.insert(out.ground_states.end(), part.states.begin(), part.states.end());
      second = std::min(second, part.second);
    } else {
      second = std::min(second, part.lowest);
    }
  }
  if (second == std::numeric_limits<std::int64_t>::max()) {
    throw Error(Errc::DegenerateSpectrum, "all states have the same energy");
  }
  std::sort(out.ground_states.begin(), out.ground_states.end());
  out.ground_energy = Rational(lowest, scaled.denominator);
  out.gap = Rational(second - lowest, scaled.denominator);
  return out;
}

}  // namespace hpdesign
