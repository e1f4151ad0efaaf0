#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace hpdesign;

namespace {

IsingProblem t10_problem() {
  return to_ising(DesignEnergyModel(contact_map(most_designable(10)), parse_rational("1.1"), 4));
}

}  // namespace

TEST(NoiseSigmas, Examples) {
  auto s = noise_sigmas(NoiseSpec{0.015, 2, 2.25}, 0.25);
  EXPECT_NEAR(s.h, 0.015 * 0.25 / std::sqrt(2.0), 1e-17);
  EXPECT_NEAR(s.h, 0.00265165, 1e-8);
  EXPECT_NEAR(s.j, 0.03375, 1e-15);
  auto zero = noise_sigmas(NoiseSpec{0.0, 3, 4.0}, 0.7);
  EXPECT_EQ(zero.h, 0.0);
  EXPECT_EQ(zero.j, 0.0);
  auto unit = noise_sigmas(NoiseSpec{0.02, 1, 1.0}, 0.5);
  EXPECT_DOUBLE_EQ(unit.h, 0.01);
  EXPECT_DOUBLE_EQ(unit.j, 0.02);
  EXPECT_THROW(noise_sigmas(NoiseSpec{}, -1.0), Error);
}

TEST(NoiseSpecTest, Validation) {
  EXPECT_THROW((NoiseSpec{-0.1, 1, 1.0}).validate(), Error);
  EXPECT_THROW((NoiseSpec{0.1, 0, 1.0}).validate(), Error);
  try {
    (NoiseSpec{0.1, 1, 0.0}).validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonpositiveParameter);
  }
}

TEST(Perturb, ZeroNoiseAndDeterminism) {
  auto p = t10_problem();
  auto f = to_float(p);
  auto same = perturb(p, NoiseSpec{0.0, 2, 2.25}, 5, 3);
  EXPECT_EQ(same.h, f.h);
  EXPECT_EQ(same.j, f.j);
  EXPECT_EQ(same.offset, f.offset);
  NoiseSpec spec{0.015, 2, 2.25};
  auto a = perturb(p, spec, 5, 3);
  auto b = perturb(p, spec, 5, 3);
  EXPECT_EQ(a.h, b.h);
  EXPECT_EQ(a.j, b.j);
  EXPECT_EQ(a.offset, f.offset);
  auto c = perturb(p, spec, 5, 4);
  EXPECT_NE(a.h, c.h);
  // Lower triangle stays untouched.
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j <= i; ++j) EXPECT_EQ(a.j[static_cast<std::size_t>(i * p.n + j)], f.j[static_cast<std::size_t>(i * p.n + j)]);
}

TEST(Perturb, EmpiricalCouplerSpread) {
  // 10^5 coupler draws from a 2-spin problem give the second moment to ~0.5%.
  IsingProblemF p(2);
  NoiseSpec spec{0.02, 1, 3.0};
  const int draws = 100000;
  double sum = 0, sq = 0;
  for (int k = 0; k < draws; ++k) {
    double d = perturb(p, spec, 77, static_cast<std::uint64_t>(k)).coupler(0, 1);
    sum += d;
    sq += d * d;
  }
  double mean = sum / draws;
  double sd = std::sqrt(sq / draws - mean * mean);
  EXPECT_NEAR(sd, 0.06, 0.06 * 0.01);
  EXPECT_NEAR(mean, 0.0, 5 * 0.06 / std::sqrt(static_cast<double>(draws)));
}

TEST(OverlapRate, ZeroNoiseIsOne) {
  auto r = ground_state_overlap_rate(t10_problem(), NoiseSpec{0.0, 2, 2.25}, 100, 1);
  EXPECT_EQ(r.samples, 100u);
  EXPECT_EQ(r.successes, 100u);
  EXPECT_EQ(r.p_g, 1.0);
  EXPECT_EQ(r.ci95(), 0.0);
}

TEST(OverlapRate, ZeroNoiseDegenerateGroundSetIsOne) {
  // With ties inside the ground set every minimizer is still a member.
  auto p = to_ising(DesignEnergyModel(contact_map(most_designable(13)), parse_rational("1.1"), 6));
  EXPECT_EQ(ground_state_overlap_rate(p, NoiseSpec{0.0, 3, 2.75}, 10, 1).p_g, 1.0);
}

TEST(OverlapRate, MatchesDirectMinimizerCheck) {
  auto p = t10_problem();
  auto ground = spectrum(p).ground_states;
  NoiseSpec spec{0.08, 2, 2.25};
  auto r = ground_state_overlap_rate(p, spec, 300, 9);
  std::uint64_t want = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto q = perturb(p, spec, 9, i);
    double best = 1e300;
    std::uint64_t arg = 0;
    for (std::uint64_t s = 0; s < (1u << p.n); ++s) {
      double e = q.energy(s);
      if (e < best) {
        best = e;
        arg = s;
      }
    }
    want += std::find(ground.begin(), ground.end(), arg) != ground.end();
  }
  EXPECT_EQ(r.successes, want);
  EXPECT_GT(want, 0u);
  EXPECT_LT(want, 300u);
}

TEST(OverlapRate, ThreadIndependent) {
  auto p = t10_problem();
  NoiseSpec spec{0.05, 2, 2.25};
  set_thread_count(1);
  auto a = ground_state_overlap_rate(p, spec, 2000, 3);
  set_thread_count(4);
  auto b = ground_state_overlap_rate(p, spec, 2000, 3);
  set_thread_count(0);
  EXPECT_EQ(a.successes, b.successes);
}

TEST(OverlapRate, MonotoneInStrength) {
  auto p = t10_problem();
  std::vector<double> pg;
  for (double x : {0.003, 0.015, 0.030, 0.1}) pg.push_back(ground_state_overlap_rate(p, NoiseSpec{x, 2, 2.25}, 2000, 4).p_g);
  for (std::size_t i = 1; i < pg.size(); ++i) EXPECT_GE(pg[i - 1], pg[i]);
  EXPECT_LT(pg.back(), 1.0);
}

TEST(OverlapRate, Errors) {
  EXPECT_THROW(ground_state_overlap_rate(t10_problem(), NoiseSpec{}, 0, 1), Error);
  try {
    ground_state_overlap_rate(IsingProblem(25), NoiseSpec{}, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TooLarge);
  }
}

TEST(OverlapRate, CiShrinksWithSamples) {
  NoiseEnsembleResult a{1000, 500, 0.5, 1, {}};
  NoiseEnsembleResult b{2000, 1000, 0.5, 1, {}};
  EXPECT_NEAR(b.ci95() / a.ci95(), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(JcsSweep, RowsAndCommonRandomNumbers) {
  auto p = t10_problem();
  std::vector<double> one = {2.25};
  EXPECT_EQ(jcs_sweep(p, 0.015, 2, one, 50, 1).size(), 1u);
  std::vector<double> list = {2.25, 4.25, 8.0};
  auto rows = jcs_sweep(p, 0.03, 2, list, 2000, 2);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_DOUBLE_EQ(rows[i].spec.j_cs, list[i]);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double sd = std::sqrt(rows[i].p_g * (1 - rows[i].p_g) / 2000.0);
    EXPECT_GE(rows[i - 1].p_g + 5 * sd, rows[i].p_g);
  }
}

TEST(NSweep, SlopeCases) {
  std::vector<NoiseSystem> one = {{10, t10_problem(), NoiseSpec{0.015, 2, 2.25}}};
  auto single = n_sweep(one, 100, 1);
  EXPECT_EQ(single.rows.size(), 1u);
  EXPECT_FALSE(single.log_slope);
  std::vector<NoiseSystem> flat;
  for (int n : {10, 12}) {
    auto p = to_ising(DesignEnergyModel(contact_map(most_designable(n)), parse_rational("1.1"), 4));
    flat.push_back({n, p, NoiseSpec{0.0, 2, 2.25}});
  }
  auto zero = n_sweep(flat, 50, 1);
  ASSERT_TRUE(zero.log_slope);
  EXPECT_EQ(*zero.log_slope, 0.0);
  std::vector<double> xs = {1, 2, 3}, ys = {1, 3, 5};
  EXPECT_DOUBLE_EQ(*least_squares_slope(xs, ys), 2.0);
}
