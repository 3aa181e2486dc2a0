#include <gtest/gtest.h>

#include <vector>

#include "rwres/rng.hpp"
#include "rwres/walk.hpp"

using namespace rwres;

TEST(WalkId, LineageString) {
  WalkId id;
  id.root = 7;
  EXPECT_EQ(id.str(), "7");
  const WalkId child = id.child(12, 2040).child(3, 2100);
  EXPECT_EQ(child.str(), "7/(12,2040)/(3,2100)");
  EXPECT_EQ(id.str(), "7");
}

TEST(Histogram, CountsAndQuantiles) {
  ReturnTimeHistogram h;
  EXPECT_TRUE(h.empty());
  for (int g : {3, 1, 4, 1, 5, 9, 2, 6}) h.add(g);
  EXPECT_EQ(h.size(), 8u);
  EXPECT_EQ(h.count_greater(0), 8u);
  EXPECT_EQ(h.count_greater(1), 6u);
  EXPECT_EQ(h.count_greater(4), 3u);
  EXPECT_EQ(h.count_greater(9), 0u);
  EXPECT_EQ(h.count_greater(1'000'000), 0u);
  EXPECT_EQ(h.min(), 1);
  EXPECT_DOUBLE_EQ(h.mean(), 31.0 / 8);
  EXPECT_EQ(h.quantile(0.5), 3);
  EXPECT_EQ(h.quantile(1.0), 9);
  EXPECT_DOUBLE_EQ(h.excess_over(4), 1 + 5 + 2);
  EXPECT_THROW(h.add(0), std::invalid_argument);
}

TEST(Histogram, MatchesDirectCountAfterGrowthAndMerge) {
  Rng rng(5);
  ReturnTimeHistogram a, b;
  std::vector<std::int64_t> all;
  for (int i = 0; i < 3000; ++i) {
    const auto g = static_cast<std::int64_t>(1 + rng.index(i < 1500 ? 50 : 5000));
    (i % 3 ? a : b).add(g);
    all.push_back(g);
  }
  a.merge(b);
  ASSERT_EQ(a.size(), all.size());
  for (std::int64_t e : {0, 1, 10, 49, 50, 51, 777, 4999, 5000, 9000}) {
    std::uint64_t direct = 0;
    for (auto g : all) direct += g > e;
    EXPECT_EQ(a.count_greater(e), direct) << "e=" << e;
  }
}

TEST(NodeState, KnowForgetShift) {
  NodeState s;
  EXPECT_FALSE(s.knows(3));
  s.set_last_seen(3, 10);
  s.set_last_seen(1, 12);
  ASSERT_EQ(s.known().size(), 2u);
  EXPECT_EQ(s.known()[0], 3u);
  s.shift_time(10);
  EXPECT_EQ(s.last_seen(3), 0);
  EXPECT_EQ(s.last_seen(1), 2);
  s.forget(3);
  EXPECT_FALSE(s.knows(3));
  EXPECT_EQ(s.known().size(), 1u);
  s.forget(3);
  EXPECT_EQ(s.last_seen(3), NodeState::kNever);
}

TEST(RecordVisit, FirstVisitThenReturns) {
  NodeState s;
  EXPECT_FALSE(record_visit(s, 0, 5).has_value());
  EXPECT_EQ(s.return_samples().size(), 0u);
  EXPECT_EQ(record_visit(s, 0, 9), 4);
  EXPECT_EQ(record_visit(s, 0, 9), std::nullopt);
  EXPECT_EQ(record_visit(s, 0, 20), 11);
  EXPECT_EQ(s.return_samples().size(), 2u);
  EXPECT_EQ(s.last_seen(0), 20);
}
