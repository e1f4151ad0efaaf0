#pragma once

// State-vector quantum annealing: H(t) = a(t) H_D + b(t) H_P with a linear
// schedule, integrated with a midpoint Crank-Nicolson step whose implicit
// system is solved matrix-free by conjugate gradients.
//
// Basis index bit i is s_i (1 = H = sigma +1), matching ising.hpp.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hpdesign/error.hpp"
#include "hpdesign/ising.hpp"
#include "hpdesign/parallel.hpp"
#include "hpdesign/random.hpp"

namespace hpdesign {

using cplx = std::complex<double>;

inline constexpr int kMaxSimulatedQubits = 20;

enum class Driver { X, XY };

struct AnnealSchedule {
  double t_f = 20.0;

  explicit AnnealSchedule(double tf = 20.0) : t_f(tf) {
    if (!(t_f > 0)) throw Error(Errc::InvalidArgument, "t_f must be positive");
  }
  double a(double t) const { return 1.0 - t / t_f; }
  double b(double t) const { return t / t_f; }
};

struct IntegratorConfig {
  double eps = 0.01;
  double cg_tolerance = 1e-12;
  int cg_max_iterations = 0;  // 0: 10 * 2^(n/2) + 100

  /// Steps for a run of length t_f: the step is shrunk so it divides t_f.
  std::int64_t steps_for(double t_f) const {
    if (!(eps > 0)) throw Error(Errc::InvalidArgument, "step size must be positive");
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t_f / eps - 1e-9)));
  }
  int max_iterations(int n) const {
    return cg_max_iterations > 0 ? cg_max_iterations : 10 * (1 << (n / 2)) + 100;
  }
};

/// Either all 2^n basis states or the states of one Hamming weight.
class Basis {
 public:
  static std::shared_ptr<const Basis> full(int n) { return std::shared_ptr<const Basis>(new Basis(n, -1)); }
  static std::shared_ptr<const Basis> fixed_weight(int n, int weight) {
    if (weight < 0 || weight > n) throw Error(Errc::CompositionOutOfRange, "weight outside [0, n]");
    return std::shared_ptr<const Basis>(new Basis(n, weight));
  }

  int qubits() const noexcept { return n_; }
  bool is_full() const noexcept { return weight_ < 0; }
  int weight() const noexcept { return weight_; }
  std::size_t size() const noexcept { return is_full() ? (std::size_t{1} << n_) : states_.size(); }
  std::uint64_t state(std::size_t idx) const { return is_full() ? idx : states_[idx]; }
  /// Index of a basis mask, or -1 when the mask lies outside this basis.
  std::int64_t index(std::uint64_t mask) const {
    if (mask >> n_) return -1;
    return is_full() ? static_cast<std::int64_t>(mask) : position_[mask];
  }

 private:
  Basis(int n, int weight) : n_(n), weight_(weight) {
    if (n < 1 || n > kMaxSimulatedQubits) {
      throw Error(Errc::StateTooLarge, "qubit count " + std::to_string(n) + " outside [1, 20]");
    }
    if (weight_ >= 0) {
      position_.assign(std::size_t{1} << n, -1);
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        if (std::popcount(m) == weight_) {
          position_[m] = static_cast<std::int32_t>(states_.size());
          states_.push_back(m);
        }
      }
    }
  }

  int n_;
  int weight_;
  std::vector<std::uint64_t> states_;
  std::vector<std::int32_t> position_;
};

struct QuantumState {
  std::shared_ptr<const Basis> basis;
  std::vector<cplx> amplitudes;

  int qubits() const { return basis->qubits(); }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
  }
  /// |amplitude|^2 of a computational basis state.
  double probability(std::uint64_t mask) const {
    auto idx = basis->index(mask);
    return idx < 0 ? 0.0 : std::norm(amplitudes[static_cast<std::size_t>(idx)]);
  }
  /// Probability outside the Hamming-weight-w sector.
  double leak_outside_weight(int w) const {
    double s = 0.0;
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
      if (std::popcount(basis->state(k)) != w) s += std::norm(amplitudes[k]);
    }
    return s;
  }
};

/// Sign of the driver term. The X driver follows H_D = +sum sigma^x; the XY
/// default is -1 so that the uniform fixed-weight superposition is the
/// driver's ground state.
inline double default_driver_sign(Driver d) { return d == Driver::X ? 1.0 : -1.0; }

struct AnnealOptions {
  std::optional<double> driver_sign;
  /// XY only: evolve in the C(n, n_h)-dimensional fixed-weight sector.
  bool restrict_to_subspace = false;
  int max_qubits = kMaxSimulatedQubits;
};

/// Matrix-free a H_D + b H_P on a basis. H_P is the diagonal
/// sum h sigma^z + sum J sigma^z sigma^z without the constant offset.
class AnnealHamiltonian {
 public:
  AnnealHamiltonian(const IsingProblemF& problem, Driver driver, std::shared_ptr<const Basis> basis,
                    double driver_sign)
      : basis_(std::move(basis)), driver_(driver), sign_(driver_sign), n_(problem.n) {
    if (basis_->qubits() != problem.n) throw Error(Errc::DimensionMismatch, "basis and problem sizes differ");
    if (driver_ == Driver::X && !basis_->is_full()) {
      throw Error(Errc::InvalidArgument, "the X driver does not preserve a fixed-weight sector");
    }
    diagonal_.resize(basis_->size());
    if (basis_->is_full()) {
      gray_scan<IsingProblemF, double>(problem, 0, n_, [&](std::uint64_t s, double e) {
        diagonal_[s] = e - problem.offset;
      });
    } else {
      for (std::size_t k = 0; k < basis_->size(); ++k) diagonal_[k] = problem.energy(basis_->state(k)) - problem.offset;
    }
  }

  const std::shared_ptr<const Basis>& basis() const noexcept { return basis_; }
  std::span<const double> diagonal() const noexcept { return diagonal_; }

  /// out = (a H_D + b H_P) in.
  void apply(double a, double b, std::span<const cplx> in, std::span<cplx> out) const {
    if (in.size() != basis_->size() || out.size() != basis_->size()) {
      throw Error(Errc::DimensionMismatch, "state dimension does not match the basis");
    }
    const double da = a * sign_;
    parallel_chunks(in.size(), 4096, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        cplx acc = b * diagonal_[k] * in[k];
        if (da != 0.0) {
          if (driver_ == Driver::X) {
            cplx flips = 0.0;
            for (int i = 0; i < n_; ++i) flips += in[k ^ (std::size_t{1} << i)];
            acc += da * flips;
          } else {
            acc += da * swap_sum(k, in);
          }
        }
        out[k] = acc;
      }
    });
  }

 private:
  // (1/2)(XX + YY) on qubits i, j maps |..0_i..1_j..> <-> |..1_i..0_j..> with
  // unit amplitude and annihilates aligned pairs.
  cplx swap_sum(std::size_t k, std::span<const cplx> in) const {
    std::uint64_t x = basis_->state(k);
    cplx sum = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        if (((x >> i) ^ (x >> j)) & 1u) {
          std::uint64_t y = x ^ ((std::uint64_t{1} << i) | (std::uint64_t{1} << j));
          sum += in[static_cast<std::size_t>(basis_->is_full() ? y : static_cast<std::uint64_t>(basis_->index(y)))];
        }
      }
    }
    return sum;
  }

  std::shared_ptr<const Basis> basis_;
  Driver driver_;
  double sign_;
  int n_;
  std::vector<double> diagonal_;
};

inline QuantumState initial_state(int n, Driver driver, std::optional<int> n_h = std::nullopt,
                                  const AnnealOptions& options = {}) {
  if (n > options.max_qubits) throw Error(Errc::StateTooLarge, "more qubits than the simulator cap");
  double sign = options.driver_sign.value_or(default_driver_sign(driver));
  QuantumState st;
  if (driver == Driver::X) {
    st.basis = Basis::full(n);
    double mag = std::pow(2.0, -0.5 * n);
    st.amplitudes.resize(st.basis->size());
    for (std::size_t k = 0; k < st.amplitudes.size(); ++k) {
      // Ground state of +sigma^x per qubit is (|0> - |1>)/sqrt2.
      bool odd = std::popcount(static_cast<std::uint64_t>(k)) % 2 == 1;
      st.amplitudes[k] = (sign > 0 && odd) ? -mag : mag;
    }
    return st;
  }
  if (!n_h) throw Error(Errc::MissingComposition, "the XY driver needs n_h");
  st.basis = options.restrict_to_subspace ? Basis::fixed_weight(n, *n_h) : Basis::full(n);
  st.amplitudes.assign(st.basis->size(), 0.0);
  std::size_t support = 0;
  for (std::size_t k = 0; k < st.basis->size(); ++k) support += std::popcount(st.basis->state(k)) == *n_h;
  double amp = 1.0 / std::sqrt(static_cast<double>(support));
  for (std::size_t k = 0; k < st.basis->size(); ++k) {
    if (std::popcount(st.basis->state(k)) == *n_h) st.amplitudes[k] = amp;
  }
  return st;
}

/// (a H_D + b H_P) psi, unnormalized.
inline QuantumState apply_hamiltonian(const QuantumState& state, const IsingProblemF& problem, Driver driver,
                                      double a, double b, std::optional<double> driver_sign = std::nullopt) {
  AnnealHamiltonian ham(problem, driver, state.basis, driver_sign.value_or(default_driver_sign(driver)));
  QuantumState out{state.basis, std::vector<cplx>(state.amplitudes.size())};
  ham.apply(a, b, state.amplitudes, out.amplitudes);
  return out;
}

inline double ground_state_probability(const QuantumState& state, std::span<const std::uint64_t> ground_set) {
  if (ground_set.empty()) throw Error(Errc::EmptyGroundSet, "ground set is empty");
  double p = 0.0;
  for (auto g : ground_set) p += state.probability(g);
  return p;
}

struct TracePoint {
  double t = 0.0;
  double norm = 1.0;
  double p_g = 0.0;
  double subspace_leak = 0.0;
};

struct TraceSink {
  std::function<void(const TracePoint&)> record;
  std::vector<std::uint64_t> ground_set;  // for the P_g column; may be empty
  std::optional<int> weight;              // for the leak column
  std::int64_t every = 1;                 // record every k steps (plus start and end)
};

namespace detail {

inline cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

inline double norm2(std::span<const cplx> a) {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  return s;
}

}  // namespace detail

/// One Crank-Nicolson step with Hamiltonian H = a H_D + b H_P:
/// solves (T T^dag) v = T^2 psi, T = 1 - i (eps/2) H, by conjugate gradients.
/// Returns the number of CG iterations.
inline int crank_nicolson_step(const AnnealHamiltonian& ham, double a, double b, double eps,
                               const IntegratorConfig& config, std::vector<cplx>& psi) {
  const std::size_t dim = psi.size();
  const cplx half_step(0.0, -0.5 * eps);
  std::vector<cplx> tmp(dim), u(dim), x(dim), r(dim), p(dim), ap(dim);

  auto apply_t = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    ham.apply(a, b, in, tmp);
    for (std::size_t k = 0; k < dim; ++k) out[k] = in[k] + half_step * tmp[k];
  };
  // A = T T^dag = 1 + (eps^2/4) H^2.
  const double quarter_eps2 = 0.25 * eps * eps;
  std::vector<cplx> hx(dim);
  auto apply_a = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    ham.apply(a, b, in, hx);
    ham.apply(a, b, hx, out);
    for (std::size_t k = 0; k < dim; ++k) out[k] = in[k] + quarter_eps2 * out[k];
  };

  apply_t(psi, x);
  apply_t(x, u);
  x = u;  // T^2 psi is a first-order accurate starting guess
  apply_a(x, ap);
  for (std::size_t k = 0; k < dim; ++k) r[k] = u[k] - ap[k];
  p = r;
  const double target = config.cg_tolerance * std::sqrt(detail::norm2(u));
  double rs = detail::norm2(r);
  const int max_iter = config.max_iterations(ham.basis()->qubits());
  int iter = 0;
  while (std::sqrt(rs) > target) {
    if (iter >= max_iter) {
      throw Error(Errc::CgNoConvergence, "residual " + std::to_string(std::sqrt(rs)) + " after " +
                                             std::to_string(iter) + " iterations");
    }
    apply_a(p, ap);
    double alpha = rs / detail::dot(p, ap).real();
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    double rs_next = detail::norm2(r);
    double beta = rs_next / rs;
    rs = rs_next;
    for (std::size_t k = 0; k < dim; ++k) p[k] = r[k] + beta * p[k];
    ++iter;
  }
  psi.swap(x);
  return iter;
}

/// Integrates from the driver ground state to t_f and returns psi(t_f).
inline QuantumState evolve(const IsingProblemF& problem, Driver driver, const AnnealSchedule& schedule,
                           const IntegratorConfig& config, std::optional<int> n_h = std::nullopt,
                           const AnnealOptions& options = {}, const TraceSink* trace = nullptr) {
  if (problem.n > options.max_qubits) {
    throw Error(Errc::StateTooLarge, std::to_string(problem.n) + " qubits exceeds the cap of " +
                                         std::to_string(options.max_qubits));
  }
  QuantumState state = initial_state(problem.n, driver, n_h, options);
  AnnealHamiltonian ham(problem, driver, state.basis, options.driver_sign.value_or(default_driver_sign(driver)));
  const std::int64_t steps = config.steps_for(schedule.t_f);
  const double eps = schedule.t_f / static_cast<double>(steps);

  auto record = [&](double t) {
    if (!trace || !trace->record) return;
    TracePoint pt;
    pt.t = t;
    pt.norm = state.norm();
    pt.p_g = trace->ground_set.empty() ? 0.0 : ground_state_probability(state, trace->ground_set);
    pt.subspace_leak = trace->weight ? state.leak_outside_weight(*trace->weight) : 0.0;
    trace->record(pt);
  };
  record(0.0);
  for (std::int64_t m = 0; m < steps; ++m) {
    double t_mid = (static_cast<double>(m) + 0.5) * eps;
    crank_nicolson_step(ham, schedule.a(t_mid), schedule.b(t_mid), eps, config, state.amplitudes);
    if (trace && ((m + 1) % std::max<std::int64_t>(1, trace->every) == 0 || m + 1 == steps)) {
      record(static_cast<double>(m + 1) * eps);
    }
  }
  return state;
}

struct ChiResult {
  double eps = 0.0;
  double p_coarse = 0.0;  // P_g at 2 eps
  double p_mid = 0.0;     // P_g at eps
  double p_fine = 0.0;    // P_g at eps / 2
  double chi = 0.0;
};

/// chi(eps) = [P_g(eps) - P_g(eps/2)] / [P_g(2 eps) - P_g(eps)]; tends to
/// 1/4 for a second-order integrator.
inline ChiResult chi_diagnostic(const IsingProblemF& problem, Driver driver, double t_f, double eps,
                                std::span<const std::uint64_t> ground_set, std::optional<int> n_h = std::nullopt,
                                IntegratorConfig base = {}, const AnnealOptions& options = {}) {
  if (ground_set.empty()) throw Error(Errc::EmptyGroundSet, "ground set is empty");
  const double steps[3] = {2.0 * eps, eps, 0.5 * eps};
  double p[3] = {0, 0, 0};
  AnnealSchedule schedule(t_f);
  for (double s : steps) {
    double m = t_f / s;
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m)) {
      throw Error(Errc::InvalidArgument, "step " + std::to_string(s) + " does not divide t_f");
    }
  }
  parallel_for(
      3,
      [&](std::size_t k) {
        IntegratorConfig c = base;
        c.eps = steps[k];
        p[k] = ground_state_probability(evolve(problem, driver, schedule, c, n_h, options), ground_set);
      },
      1);
  ChiResult out{eps, p[0], p[1], p[2], 0.0};
  double denominator = p[0] - p[1];
  if (std::abs(denominator) < 1e-14) {
    throw Error(Errc::DegenerateDifference, "P_g(2 eps) - P_g(eps) vanishes");
  }
  out.chi = (p[1] - p[2]) / denominator;
  return out;
}

/// i.i.d. measurement outcomes drawn from |psi|^2; deterministic per seed.
inline std::vector<std::uint64_t> sample_bitstrings(const QuantumState& state, std::size_t count,
                                                    std::uint64_t seed) {
  if (count < 1) throw Error(Errc::InvalidArgument, "count must be >= 1");
  std::vector<double> cumulative(state.amplitudes.size());
  double total = 0.0;
  for (std::size_t k = 0; k < cumulative.size(); ++k) {
    total += std::norm(state.amplitudes[k]);
    cumulative[k] = total;
  }
  StreamRng rng(seed, 0);
  std::vector<std::uint64_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
    // Skip zero-probability states that share a cumulative value.
    while (k + 1 < cumulative.size() && std::norm(state.amplitudes[k]) == 0.0) ++k;
    out.push_back(state.basis->state(k));
  }
  return out;
}

}  // namespace hpdesign
