#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace hpdesign;

namespace {

const Rational k11 = parse_rational("1.1");

std::vector<std::string> strs(const std::vector<HpSequence>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(s.str());
  return out;
}

}  // namespace

TEST(Names, RoundTrip) {
  for (auto s : {SolverChoice::Exact, SolverChoice::SA, SolverChoice::Schrodinger}) {
    EXPECT_EQ(parse_solver(solver_name(s)), s);
  }
  EXPECT_THROW(parse_solver("qpu"), Error);
  EXPECT_STREQ(verdict_name(Verdict::UniqueGs), "UNIQUE_GS");
  EXPECT_STREQ(verdict_name(Verdict::BetterElsewhere), "BETTER_ELSEWHERE");
}

TEST(Design, UnitSquareExact) {
  auto r = design(LatticeStructure::parse("RUL"), 2, k11, SolverChoice::Exact, 1, 1);
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].sequence.str(), "HPPH");
  EXPECT_EQ(r.candidates[0].verdict, Verdict::UniqueGs);
  EXPECT_EQ(r.oracle_min_ehp, -1);
  EXPECT_EQ(r.oracle_degeneracy, 1u);
  ASSERT_TRUE(r.candidates[0].evidence);
  EXPECT_EQ(r.candidates[0].evidence->ground_states[0].moves(), "RUL");
}

TEST(Design, TwelveBeadTargetIsUnique) {
  auto r = design(most_designable(12), 4, k11, SolverChoice::Exact, 1, 1);
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].ehp, -4);
  EXPECT_EQ(r.candidates[0].verdict, Verdict::UniqueGs);
  EXPECT_TRUE(r.flagged.empty());
}

TEST(FilterByFolding, AllPIsDegenerate) {
  for (int n : {6, 9, 12}) {
    auto v = filter_by_folding({HpSequence::from_mask(0, n)}, most_designable(n));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].verdict, Verdict::DegenerateGs);
    EXPECT_EQ(v[0].ehp, 0);
  }
}

TEST(FilterByFolding, UniqueEvidenceRefoldsAndOrderInvariant) {
  auto target = most_designable(10);
  auto table = designability(10);
  std::vector<HpSequence> cands;
  for (std::uint64_t s = 0; s < 1024; s += 7) cands.push_back(HpSequence::from_mask(s, 10));
  auto a = filter_by_folding(cands, target);
  std::reverse(cands.begin(), cands.end());
  cands.push_back(cands.front());
  auto b = filter_by_folding(cands, target);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sequence, b[i].sequence);
    EXPECT_EQ(a[i].verdict, b[i].verdict);
    if (i) EXPECT_LT(a[i - 1].sequence.str(), a[i].sequence.str());
    if (a[i].verdict == Verdict::UniqueGs) {
      auto f = fold_sequence(a[i].sequence);
      ASSERT_TRUE(f.unique);
      EXPECT_EQ(f.ground_states[0].moves(), target.moves());
      EXPECT_EQ(table.structure_moves[static_cast<std::size_t>(table.unique_structure[a[i].sequence.mask()])],
                target.moves());
    }
    if (a[i].verdict == Verdict::BetterElsewhere) EXPECT_LT(a[i].evidence->min_ehp, a[i].ehp);
  }
}

TEST(FilterByFolding, NonCanonicalTargetStillMatches) {
  // A rotated copy of the square gets the same verdict.
  auto v = filter_by_folding({HpSequence::parse("HPPH")}, LatticeStructure::parse("ULD"));
  EXPECT_EQ(v[0].verdict, Verdict::UniqueGs);
}

TEST(FilterByFolding, BeyondLimitIsUnverified) {
  auto v = filter_by_folding({HpSequence::from_mask(5, 12)}, most_designable(12), 10);
  EXPECT_EQ(v[0].verdict, Verdict::Unverified);
  EXPECT_FALSE(v[0].evidence);
}

TEST(Optimize, ExactMatchesOracleAndCaps) {
  auto target = most_designable(13);
  auto r = optimize_sequences(target, 6, k11, SolverChoice::Exact, 1, 1);
  EXPECT_EQ(r.sequences.size(), 18u);
  EXPECT_EQ(r.oracle.degeneracy, 18u);
  for (const auto& s : r.sequences) {
    EXPECT_EQ(s.n_h(), 6);
    EXPECT_EQ(hp_energy(contact_map(target), s), r.oracle.min_ehp);
  }
  std::string long_moves(24, 'R');
  try {
    optimize_sequences(LatticeStructure::parse(long_moves), 3, k11, SolverChoice::Exact, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SolverCapExceeded);
  }
  try {
    optimize_sequences(LatticeStructure::parse(std::string(20, 'R')), 3, k11, SolverChoice::Schrodinger, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SolverCapExceeded);
  }
}

TEST(Optimize, SchrodingerFindsSquareMinimizer) {
  DesignOptions opt;
  opt.t_f = 20;
  opt.eps = 0.05;
  auto r = optimize_sequences(LatticeStructure::parse("RUL"), 2, k11, SolverChoice::Schrodinger, 50, 3, opt);
  EXPECT_EQ(strs(r.sequences), (std::vector<std::string>{"HPPH"}));
}

TEST(SaMinimize, TrivialModel) {
  auto r = sa_minimize(DesignEnergyModel(ContactMap(6, {}), Rational(0), 3), 3, 1, SaConfig{2000});
  EXPECT_EQ(r.best_energy, Rational(0));
  for (const auto& e : r.restart_best_energy) EXPECT_EQ(e, Rational(0));
  EXPECT_THROW(sa_minimize(DesignEnergyModel(ContactMap(6, {}), Rational(0), 3), 1, 1, SaConfig{0}), Error);
  EXPECT_THROW(sa_minimize(DesignEnergyModel(ContactMap(6, {}), Rational(0), 3), 0, 1), Error);
}

TEST(SaMinimize, AgreesWithExactAndIsDeterministic) {
  for (int n : {8, 10, 12}) {
    auto model = DesignEnergyModel(contact_map(most_designable(n)), k11, 4);
    auto exact = spectrum(to_ising(model));
    auto a = sa_minimize(model, 10, 11, SaConfig{20000});
    int hits = 0;
    for (const auto& e : a.restart_best_energy) hits += e == exact.ground_energy;
    EXPECT_GE(hits, 9) << n;
    EXPECT_EQ(a.best_energy, exact.ground_energy);
    for (std::size_t r = 0; r < a.restart_best.size(); ++r) {
      EXPECT_EQ(design_energy(model, a.restart_best[r]), a.restart_best_energy[r]);
    }
    set_thread_count(1);
    auto b = sa_minimize(model, 10, 11, SaConfig{20000});
    set_thread_count(0);
    EXPECT_EQ(strs(a.restart_best), strs(b.restart_best));
    EXPECT_EQ(a.restart_best_energy, b.restart_best_energy);
  }
}

TEST(Design, SaBudgetTooSmallLeavesFlaggedOnly) {
  // One Metropolis step from a random start almost never reaches the minimum;
  // whatever it returns is either a hit or is flagged, never dropped.
  auto target = most_designable(14);
  DesignOptions opt;
  opt.sa.steps = 1;
  auto r = design(target, 8, k11, SolverChoice::SA, 3, 5, opt);
  EXPECT_EQ(r.candidates.size() + r.flagged.size(), sa_minimize(DesignEnergyModel(contact_map(target), k11, 8), 3, 5, opt.sa).best.size());
}
