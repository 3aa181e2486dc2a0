#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rwres/errors.hpp"
#include "rwres/policies.hpp"

using namespace rwres;

namespace {

PolicyConfig cfg(PolicyKind kind) {
  PolicyConfig c;
  c.kind = kind;
  c.fork_prob = 0.1;
  return c;
}

NodeState with_samples(std::initializer_list<int> gaps) {
  NodeState s;
  for (int g : gaps) s.return_samples().add(g);
  return s;
}

}  // namespace

TEST(Survival, EmpiricalDirectCount) {
  const auto s = with_samples({2, 4, 6});
  const auto c = cfg(PolicyKind::decafork);
  EXPECT_DOUBLE_EQ(survival(s, 3, c), 2.0 / 3);
  EXPECT_DOUBLE_EQ(survival(s, 0, c), 1.0);
  EXPECT_DOUBLE_EQ(survival(s, 6, c), 0.0);
  EXPECT_DOUBLE_EQ(survival(NodeState{}, 50, c), 1.0);
}

TEST(Survival, Analytical) {
  auto c = cfg(PolicyKind::decafork);
  c.survival_mode = SurvivalMode::analytical_exponential;
  c.lambda = 0.1;
  EXPECT_DOUBLE_EQ(survival(NodeState{}, 0, c), 1.0);
  EXPECT_DOUBLE_EQ(survival(NodeState{}, 10, c), std::exp(-1.0));
}

TEST(Survival, NonincreasingAndBounded) {
  auto s = with_samples({1, 1, 2, 3, 5, 8, 13, 21});
  const auto c = cfg(PolicyKind::decafork);
  double prev = 1.0;
  for (int e = 0; e < 30; ++e) {
    const double v = survival(s, e, c);
    EXPECT_LE(v, prev);
    EXPECT_GE(v, 0.0);
    prev = v;
  }
}

TEST(Estimate, OffsetPlusOthers) {
  auto s = with_samples({2, 4, 6});
  const auto c = cfg(PolicyKind::decafork);
  s.set_last_seen(0, 10);
  EXPECT_DOUBLE_EQ(estimate(s, 0, 10, c), 0.5);
  s.set_last_seen(1, 7);  // elapsed 3 -> 2/3
  s.set_last_seen(2, 5);  // elapsed 5 -> 1/3
  std::vector<double> terms;
  EXPECT_DOUBLE_EQ(estimate(s, 0, 10, c, &terms), 0.5 + 2.0 / 3 + 1.0 / 3);
  EXPECT_EQ(terms.size(), 2u);
}

TEST(Estimate, NineHalvesGiveFive) {
  NodeState s;
  auto c = cfg(PolicyKind::decafork);
  c.survival_mode = SurvivalMode::analytical_exponential;
  c.lambda = std::log(2.0);
  for (WalkKey k = 0; k < 10; ++k) s.set_last_seen(k, k == 0 ? 1 : 0);
  EXPECT_NEAR(estimate(s, 0, 1, c), 5.0, 1e-12);
}

TEST(Estimate, GeometricOffset) {
  auto c = cfg(PolicyKind::decafork);
  c.offset_mode = OffsetMode::geometric_corrected;
  c.q = 0.0;
  EXPECT_DOUBLE_EQ(c.offset(), 0.5);
  c.q = 0.1;
  EXPECT_DOUBLE_EQ(c.offset(), 0.9 / 1.9);
}

TEST(Estimate, StaleEntriesNeverDecrease) {
  auto s = with_samples({2, 4, 6, 8, 10});
  const auto c = cfg(PolicyKind::decafork);
  s.set_last_seen(0, 20);
  s.set_last_seen(1, 15);
  const double before = estimate(s, 0, 20, c);
  s.set_last_seen(2, 0);
  EXPECT_GE(estimate(s, 0, 20, c), before);
  s.set_last_seen(1, 12);
  EXPECT_LE(estimate(s, 0, 20, c), estimate(s, 0, 19, c));
}

TEST(GeometricIdentity, SurvivalAtFreshSampleAveragesCorrectedOffset) {
  // P(S > S') for iid Geometric(q) on {1, 2, ...} is (1 - q) / (2 - q).
  const double q = 0.1;
  Rng rng(5);
  auto geometric = [&] {
    return static_cast<std::int64_t>(std::floor(std::log1p(-rng.uniform()) / std::log1p(-q))) + 1;
  };
  NodeState s;
  for (int i = 0; i < 200'000; ++i) s.return_samples().add(geometric());
  const auto c = cfg(PolicyKind::decafork);
  double sum = 0.0;
  constexpr int kN = 200'000;
  for (int i = 0; i < kN; ++i) sum += survival(s, geometric(), c);
  EXPECT_NEAR(sum / kN, (1 - q) / (2 - q), 0.004);
}

TEST(DecAFork, Rule) {
  const auto c = cfg(PolicyKind::decafork);
  EXPECT_EQ(decafork_decide(1.9, c, 0.05).action, DecisionAction::fork);
  EXPECT_EQ(decafork_decide(2.0, c, 0.05).action, DecisionAction::none);
  EXPECT_EQ(decafork_decide(1.9, c, 0.95).action, DecisionAction::none);
  EXPECT_EQ(decafork_decide(1.9, c, 0.05).estimate, 1.9);
}

TEST(DecAForkPlus, Rule) {
  auto c = cfg(PolicyKind::decafork_plus);
  c.gamma = 3.25;
  c.gamma_term = 5.75;
  EXPECT_EQ(decaforkplus_decide(6.0, c, 0.01).action, DecisionAction::terminate);
  EXPECT_EQ(decaforkplus_decide(5.75, c, 0.01).action, DecisionAction::none);
  EXPECT_EQ(decaforkplus_decide(4.5, c, 0.01).action, DecisionAction::none);
  EXPECT_EQ(decaforkplus_decide(3.0, c, 0.01).action, DecisionAction::fork);
  EXPECT_EQ(decaforkplus_decide(3.0, c, 0.5).action, DecisionAction::none);
  c.gamma_term = 3.0;
  EXPECT_THROW(decaforkplus_decide(6.0, c, 0.01), ConfigError);
}

TEST(DecAFork, ForkFrequencyMatchesProbability) {
  const auto c = cfg(PolicyKind::decafork);
  Rng rng(1);
  int forks = 0;
  for (int i = 0; i < 100'000; ++i) forks += decafork_decide(1.0, c, rng).action == DecisionAction::fork;
  EXPECT_NEAR(forks, 10'000, 4 * std::sqrt(9000.0));
}

TEST(MissingPerson, Rule) {
  auto c = cfg(PolicyKind::missing_person);
  c.z0 = 5;
  c.t_mp = 100;
  c.fork_prob = 1.0;
  NodeState s;
  for (WalkKey k = 0; k < 5; ++k) s.set_last_seen(k, 500);
  Rng rng(1);
  EXPECT_TRUE(missing_person_decide(s, 0, 500, c, rng).replace_ids.empty());
  s.set_last_seen(3, 500 - 101);
  const Decision d = missing_person_decide(s, 0, 500, c, rng);
  EXPECT_EQ(d.replace_ids, std::vector<WalkKey>{3});
  EXPECT_EQ(d.action, DecisionAction::fork);
  EXPECT_FALSE(d.estimate.has_value());
  s.set_last_seen(3, 400);
  EXPECT_TRUE(missing_person_decide(s, 0, 500, c, rng).replace_ids.empty());
  c.z0 = 1;
  EXPECT_TRUE(missing_person_decide(NodeState{}, 0, 10'000, c, rng).replace_ids.empty());
}

TEST(MissingPerson, NeverSeenCountsFromZero) {
  auto c = cfg(PolicyKind::missing_person);
  c.z0 = 3;
  c.t_mp = 10;
  c.fork_prob = 1.0;
  Rng rng(1);
  EXPECT_TRUE(missing_person_decide(NodeState{}, 0, 10, c, rng).replace_ids.empty());
  EXPECT_EQ(missing_person_decide(NodeState{}, 0, 11, c, rng).replace_ids.size(), 2u);
}

TEST(TailFit, CensoredExponentialRate) {
  // Gaps 10, 20, 30 beyond cutoff 5 are events; two open ages 25 and 3.
  auto s = with_samples({1, 2, 10, 20, 30});
  const std::vector<std::int64_t> open{25, 3};
  EXPECT_DOUBLE_EQ(fit_tail_rate(s.return_samples(), open, 5), 3.0 / (5 + 15 + 25 + 20));
  EXPECT_EQ(fit_tail_rate(s.return_samples(), open, 40), 0.0);
}

TEST(TailFit, RecoversExponentialTail) {
  Rng rng(9);
  ReturnTimeHistogram h;
  for (int i = 0; i < 100'000; ++i) h.add(1 + static_cast<std::int64_t>(rng.exponential(0.02)));
  // 1 + floor(Exp(0.02)) has P(gap > k) = e^{-0.02 k}.
  EXPECT_NEAR(fit_tail_rate(h, {}, h.quantile(0.5)), 0.02, 0.001);
}

TEST(Policy, DefaultThresholdIsHighQuantile) {
  ReturnTimeHistogram h;
  for (int g = 1; g <= 1000; ++g) h.add(g);
  EXPECT_EQ(default_missing_person_threshold(h, 10), 999);
  EXPECT_THROW(default_missing_person_threshold(ReturnTimeHistogram{}, 10), RuntimeError);
}

TEST(Policy, Validation) {
  auto c = cfg(PolicyKind::decafork);
  c.gamma = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = cfg(PolicyKind::decafork_plus);
  c.gamma_term = c.gamma;
  EXPECT_THROW(c.validate(), ConfigError);
  c = cfg(PolicyKind::missing_person);
  c.t_mp = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = cfg(PolicyKind::decafork);
  c.fork_prob = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(parse_policy_kind("decafork_plus"), PolicyKind::decafork_plus);
  EXPECT_THROW(parse_policy_kind("fork_everything"), ConfigError);
  EXPECT_EQ(cfg(PolicyKind::none).effective_fork_prob(), 0.1);
  PolicyConfig d;
  EXPECT_EQ(d.effective_fork_prob(), 0.1);
}
