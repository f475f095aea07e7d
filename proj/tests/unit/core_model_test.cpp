#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "musent/core_model.hpp"
#include "musent/errors.hpp"
#include "test_support.hpp"

using namespace musent;

TEST(VAPoint, RejectsNonFinite) {
  EXPECT_THROW(VAPoint(std::nan(""), 1.0), InvalidArgument);
  EXPECT_THROW(VAPoint(1.0, std::numeric_limits<double>::infinity()), InvalidArgument);
  EXPECT_NO_THROW(VAPoint(1.0, 2.0));
}

TEST(QuadrantOf, Examples) {
  EXPECT_EQ(quadrant_of({7, 7}, 5), Quadrant::Q1);
  EXPECT_EQ(quadrant_of({3, 7}, 5), Quadrant::Q2);
  EXPECT_EQ(quadrant_of({3, 3}, 5), Quadrant::Q3);
  EXPECT_EQ(quadrant_of({7, 3}, 5), Quadrant::Q4);
  EXPECT_THROW(quadrant_of({5, 2}, 5), AmbiguousPoint);
  EXPECT_THROW(quadrant_of({2, 5}, 5), AmbiguousPoint);
  EXPECT_THROW(quadrant_of({0, 0}, 0), AmbiguousPoint);
}

TEST(QuadrantOf, SignedScale) {
  EXPECT_EQ(quadrant_of({0.1, -0.2}, 0), Quadrant::Q4);
  EXPECT_EQ(quadrant_of({-1e-300, 1e-300}, 0), Quadrant::Q2);
}

TEST(QuadrantOf, AgreesWithProjection) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1.0, 9.0);
  for (int i = 0; i < 2000; ++i) {
    const VAPoint p(u(rng), u(rng));
    if (p.valence == 5.0 || p.arousal == 5.0) continue;
    const Quadrant q = quadrant_of(p, 5.0);
    EXPECT_EQ(project_quadrant(q, Axis::Valence).sign, p.valence > 5.0 ? Sign::Positive : Sign::Negative);
    EXPECT_EQ(project_quadrant(q, Axis::Arousal).sign, p.arousal > 5.0 ? Sign::Positive : Sign::Negative);
  }
}

TEST(ProjectQuadrant, Examples) {
  EXPECT_EQ(project_quadrant(Quadrant::Q3, Axis::Valence).sign, Sign::Negative);
  EXPECT_EQ(project_quadrant(Quadrant::Q2, Axis::Arousal).sign, Sign::Positive);
  EXPECT_EQ(project_quadrant(Quadrant::Q4, Axis::Arousal).sign, Sign::Negative);
  EXPECT_EQ(project_quadrant(Quadrant::Q1, Axis::Valence).axis, Axis::Valence);
}

TEST(Labels, Names) {
  EXPECT_EQ(labels_for(LabelSpace::Quadrants), (LabelSet{"Q1", "Q2", "Q3", "Q4"}));
  EXPECT_EQ(labels_for(LabelSpace::Valence), (LabelSet{"positive", "negative"}));
  EXPECT_EQ(labels_for(LabelSpace::Arousal), (LabelSet{"high", "low"}));
  EXPECT_EQ(label_in_space(Quadrant::Q2, LabelSpace::Valence), "negative");
  EXPECT_EQ(label_in_space(Quadrant::Q2, LabelSpace::Arousal), "high");
  EXPECT_EQ(label_in_space(Quadrant::Q4, LabelSpace::Quadrants), "Q4");
  EXPECT_EQ(parse_quadrant("Q3"), Quadrant::Q3);
  EXPECT_FALSE(parse_quadrant("Q5").has_value());
  EXPECT_EQ(detect_label_space({"negative", "positive"}), LabelSpace::Valence);
  EXPECT_FALSE(detect_label_space({"pos", "neg"}).has_value());
}

TEST(ClassDistribution, Validation) {
  EXPECT_THROW(ClassDistribution({}, {}), DistributionInvalid);
  EXPECT_THROW(ClassDistribution({"a", "a"}, {0.5, 0.5}), DistributionInvalid);
  EXPECT_THROW(ClassDistribution({"a", "b"}, {0.5}), DistributionInvalid);
  EXPECT_THROW(ClassDistribution({"a", "b"}, {1.2, -0.2}), DistributionInvalid);
  EXPECT_THROW(ClassDistribution({"a", "b"}, {0.5, 0.3}), DistributionInvalid);
  EXPECT_THROW(ClassDistribution({"a", "b"}, {std::nan(""), 1.0}), DistributionInvalid);
  EXPECT_THROW(ClassDistribution({"a", "b"}, {0.5, 0.5 + 2e-6}), DistributionInvalid);
}

TEST(ClassDistribution, SmallDriftIsRenormalized) {
  const ClassDistribution d({"a", "b"}, {0.5, 0.5 + 5e-7});
  EXPECT_NEAR(d.prob(0) + d.prob(1), 1.0, ClassDistribution::kSumTolerance);
}

TEST(ClassDistribution, NormalizedInputIsKeptExact) {
  const ClassDistribution d({"a", "b", "c"}, {0.1, 0.2, 0.7});
  EXPECT_EQ(d.probs(), (std::vector<double>{0.1, 0.2, 0.7}));
}

TEST(ClassDistribution, Lookup) {
  const ClassDistribution d({"x", "y", "z"}, {0.3, 0.4, 0.3});
  EXPECT_EQ(d.argmax(), 1u);
  EXPECT_EQ(d.argmax_label(), "y");
  EXPECT_DOUBLE_EQ(d.prob("z"), 0.3);
  EXPECT_THROW(d.prob("w"), UnknownLabel);
  EXPECT_FALSE(d.index_of("w").has_value());
}

TEST(ClassDistribution, ArgmaxTieGoesToLowestIndex) {
  const ClassDistribution d({"x", "y", "z"}, {0.4, 0.4, 0.2});
  EXPECT_EQ(d.argmax(), 0u);
}

TEST(ClassDistribution, FromScores) {
  const std::vector<double> scores{2.0, 6.0};
  const auto d = ClassDistribution::from_scores({"a", "b"}, scores);
  EXPECT_DOUBLE_EQ(d.prob(0), 0.25);
  EXPECT_DOUBLE_EQ(d.prob(1), 0.75);
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_THROW(ClassDistribution::from_scores({"a", "b"}, zero), DistributionInvalid);
}

TEST(ClassDistribution, Reordered) {
  const ClassDistribution d({"a", "b", "c"}, {0.1, 0.2, 0.7});
  const auto r = d.reordered({"c", "a", "b"});
  EXPECT_EQ(r.labels(), (LabelSet{"c", "a", "b"}));
  EXPECT_EQ(r.probs(), (std::vector<double>{0.7, 0.1, 0.2}));
  EXPECT_TRUE(d.same_label_set(r));
  EXPECT_THROW(d.reordered({"a", "b"}), WrongLabelSet);
  EXPECT_THROW(d.reordered({"a", "b", "d"}), WrongLabelSet);
}

TEST(Marginalize, Examples) {
  const ClassDistribution d(quadrant_labels(), {0.4, 0.1, 0.2, 0.3});
  const auto v = marginalize(d, Axis::Valence);
  EXPECT_EQ(v.labels(), (LabelSet{"positive", "negative"}));
  EXPECT_NEAR(v.prob("positive"), 0.7, 1e-12);
  EXPECT_NEAR(v.prob("negative"), 0.3, 1e-12);

  const ClassDistribution u(quadrant_labels(), {0.25, 0.25, 0.25, 0.25});
  const auto a = marginalize(u, Axis::Arousal);
  EXPECT_EQ(a.probs(), (std::vector<double>{0.5, 0.5}));

  const ClassDistribution point(quadrant_labels(), {1, 0, 0, 0});
  EXPECT_EQ(marginalize(point, Axis::Valence).probs(), (std::vector<double>{1.0, 0.0}));
}

TEST(Marginalize, RejectsNonQuadrant) {
  const ClassDistribution d({"positive", "negative"}, {0.5, 0.5});
  EXPECT_THROW(marginalize(d, Axis::Valence), WrongLabelSet);
}

TEST(Marginalize, PermutationInvariantAndMassPreserving) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto d = testkit::random_distribution(rng, quadrant_labels());
    LabelSet order = quadrant_labels();
    std::shuffle(order.begin(), order.end(), rng);
    const auto shuffled = d.reordered(order);
    for (Axis axis : {Axis::Valence, Axis::Arousal}) {
      const auto m1 = marginalize(d, axis);
      const auto m2 = marginalize(shuffled, axis);
      EXPECT_EQ(m1, m2);
      EXPECT_NEAR(m1.prob(0) + m1.prob(1), 1.0, 1e-12);
    }
  }
}

TEST(ToLabelSpace, ReordersAndMarginalizes) {
  const ClassDistribution d({"negative", "positive"}, {0.3, 0.7});
  const auto v = to_label_space(d, LabelSpace::Valence);
  EXPECT_EQ(v.labels(), (LabelSet{"positive", "negative"}));
  EXPECT_THROW(to_label_space(d, LabelSpace::Arousal), WrongLabelSet);
  EXPECT_THROW(to_label_space(d, LabelSpace::Quadrants), WrongLabelSet);
  const ClassDistribution q(quadrant_labels(), {0.1, 0.2, 0.3, 0.4});
  EXPECT_NEAR(to_label_space(q, LabelSpace::Arousal).prob("high"), 0.3, 1e-12);
}
