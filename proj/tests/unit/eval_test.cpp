#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "musent/errors.hpp"
#include "musent/eval.hpp"
#include "test_support.hpp"

using namespace musent;

namespace {
const LabelSet kQ{"Q1", "Q2", "Q3", "Q4"};
const LabelSet kAB{"A", "B"};

std::vector<Label> random_labels(std::mt19937_64& rng, const LabelSet& ls, std::size_t n) {
  std::uniform_int_distribution<std::size_t> pick(0, ls.size() - 1);
  std::vector<Label> out(n);
  for (auto& l : out) l = ls[pick(rng)];
  return out;
}
}  // namespace

TEST(Confusion, Examples) {
  const std::vector<Label> g{"Q1", "Q2"};
  const auto cm = confusion(g, g, kQ);
  EXPECT_EQ(cm.trace(), 2u);
  EXPECT_EQ(cm.total(), 2u);
  EXPECT_EQ(cm.count("Q1", "Q1"), 1u);

  const std::vector<Label> g2{"Q1", "Q1"}, p2{"Q2", "Q2"};
  EXPECT_EQ(confusion(g2, p2, kQ).count("Q1", "Q2"), 2u);
}

TEST(Confusion, SixRecordsAgainstCounting) {
  const std::vector<Label> g{"Q1", "Q2", "Q3", "Q1", "Q4", "Q2"};
  const std::vector<Label> p{"Q1", "Q3", "Q3", "Q2", "Q4", "Q2"};
  const auto cm = confusion(g, p, kQ);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      std::uint64_t n = 0;
      for (std::size_t k = 0; k < g.size(); ++k) n += g[k] == kQ[i] && p[k] == kQ[j];
      EXPECT_EQ(cm.count(i, j), n);
    }
  }
  EXPECT_EQ(cm.trace(), 4u);
}

TEST(Confusion, Errors) {
  const std::vector<Label> a{"Q1"}, b{"Q1", "Q2"}, bad{"Q9"};
  EXPECT_THROW(confusion(a, b, kQ), LengthMismatch);
  EXPECT_THROW(confusion(bad, a, kQ), UnknownLabel);
  EXPECT_THROW(confusion(a, bad, kQ), UnknownLabel);
}

TEST(Metrics, Diagonal) {
  const std::vector<Label> g{"A", "B", "A"};
  const auto r = metrics(confusion(g, g, kAB));
  for (const auto& l : kAB) {
    EXPECT_EQ(r.per_class.at(l).precision, 1.0);
    EXPECT_EQ(r.per_class.at(l).recall, 1.0);
    EXPECT_EQ(r.per_class.at(l).f1, 1.0);
  }
  EXPECT_EQ(r.macro.f1, 1.0);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_TRUE(r.flagged().empty());
}

TEST(Metrics, HandCount) {
  const std::vector<Label> g{"A", "A", "A", "B", "B", "B"};
  const std::vector<Label> p{"A", "A", "B", "A", "B", "B"};
  const auto r = metrics(confusion(g, p, kAB));
  EXPECT_DOUBLE_EQ(r.per_class.at("A").precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class.at("A").recall, 2.0 / 3.0);
  EXPECT_EQ(r.per_class.at("A").support, 3u);
  EXPECT_EQ(r.per_class.at("A").predicted, 3u);
}

TEST(Metrics, ZeroDivisionZeroFlags) {
  const std::vector<Label> g{"A", "A"};
  const auto r = metrics(confusion(g, g, kAB), ZeroDivision::Zero);
  EXPECT_EQ(r.per_class.at("B").precision, 0.0);
  EXPECT_TRUE(r.per_class.at("B").precision_undefined);
  EXPECT_TRUE(r.per_class.at("B").recall_undefined);
  EXPECT_EQ(r.flagged(), (std::vector<Label>{"B"}));
  EXPECT_DOUBLE_EQ(r.macro.f1, 0.5);
}

TEST(Metrics, ZeroDivisionSkipDropsUndefined) {
  const std::vector<Label> g{"A", "A"};
  const auto r = metrics(confusion(g, g, kAB), ZeroDivision::Skip);
  EXPECT_EQ(r.per_class.at("B").precision, 0.0);
  EXPECT_DOUBLE_EQ(r.macro.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.macro.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.macro.f1, 1.0);
}

TEST(Metrics, MicroEqualsAccuracy) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const auto g = random_labels(rng, kQ, 1 + i % 40);
    const auto p = random_labels(rng, kQ, g.size());
    const auto r = metrics(confusion(g, p, kQ));
    EXPECT_NEAR(r.micro.f1, r.accuracy, 1e-15);
    EXPECT_NEAR(r.micro.precision, r.accuracy, 1e-15);
    EXPECT_NEAR(r.micro.recall, r.accuracy, 1e-15);
  }
}

TEST(Metrics, MatchesBruteForceOracle) {
  std::mt19937_64 rng(97);
  for (int i = 0; i < 300; ++i) {
    const LabelSet& ls = i % 2 ? kQ : kAB;
    const auto g = random_labels(rng, ls, 1 + i % 50);
    const auto p = random_labels(rng, ls, g.size());
    const auto r = metrics(confusion(g, p, ls));
    const auto o = testkit::oracle_metrics(g, p, ls);
    for (std::size_t c = 0; c < ls.size(); ++c) {
      EXPECT_NEAR(r.per_class.at(ls[c]).precision, o.per_class[c].precision, 1e-12);
      EXPECT_NEAR(r.per_class.at(ls[c]).recall, o.per_class[c].recall, 1e-12);
      EXPECT_NEAR(r.per_class.at(ls[c]).f1, o.per_class[c].f1, 1e-12);
    }
    EXPECT_NEAR(r.macro.f1, o.macro_f1, 1e-12);
    EXPECT_NEAR(r.accuracy, o.accuracy, 1e-12);
  }
}

TEST(Metrics, PermutationInvariant) {
  std::mt19937_64 rng(41);
  auto g = random_labels(rng, kQ, 40);
  auto p = random_labels(rng, kQ, 40);
  const auto base = metrics(confusion(g, p, kQ));
  std::vector<std::size_t> idx(g.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<Label> g2, p2;
  for (auto i : idx) {
    g2.push_back(g[i]);
    p2.push_back(p[i]);
  }
  const auto shuffled = metrics(confusion(g2, p2, kQ));
  EXPECT_EQ(base.macro.f1, shuffled.macro.f1);
  for (const auto& l : kQ) EXPECT_EQ(base.per_class.at(l).f1, shuffled.per_class.at(l).f1);
}

TEST(Metrics, BinarySwapSwapsClasses) {
  std::mt19937_64 rng(43);
  const auto g = random_labels(rng, kAB, 30);
  const auto p = random_labels(rng, kAB, 30);
  auto swap = [](std::vector<Label> v) {
    for (auto& l : v) l = l == "A" ? "B" : "A";
    return v;
  };
  const auto r1 = metrics(confusion(g, p, kAB));
  const auto r2 = metrics(confusion(swap(g), swap(p), kAB));
  EXPECT_DOUBLE_EQ(r1.per_class.at("A").f1, r2.per_class.at("B").f1);
  EXPECT_DOUBLE_EQ(r1.per_class.at("B").precision, r2.per_class.at("A").precision);
  EXPECT_NEAR(r1.macro.f1, r2.macro.f1, 1e-15);
}

TEST(Score, Metrics) {
  const std::vector<Label> g{"A", "A", "B"}, p{"A", "B", "B"};
  const auto r = metrics(confusion(g, p, kAB));
  EXPECT_EQ(score(r, ScoreMetric::MacroF1), r.macro.f1);
  EXPECT_EQ(score(r, ScoreMetric::Accuracy), r.accuracy);
  EXPECT_EQ(parse_score_metric("micro-f1"), ScoreMetric::MicroF1);
  EXPECT_EQ(to_string(ScoreMetric::MacroF1), "macro-f1");
}
