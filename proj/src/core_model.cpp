#include "musent/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "musent/errors.hpp"

namespace musent {

VAPoint::VAPoint(double v, double a) : valence(v), arousal(a) {
  if (!std::isfinite(v) || !std::isfinite(a)) {
    throw InvalidArgument("VAPoint coordinates must be finite");
  }
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::Q1: return "Q1";
    case Quadrant::Q2: return "Q2";
    case Quadrant::Q3: return "Q3";
    case Quadrant::Q4: return "Q4";
  }
  return "?";
}

std::string_view to_string(Axis axis) { return axis == Axis::Valence ? "valence" : "arousal"; }

std::string_view to_string(LabelSpace space) {
  switch (space) {
    case LabelSpace::Quadrants: return "quadrants";
    case LabelSpace::Valence: return "valence";
    case LabelSpace::Arousal: return "arousal";
  }
  return "?";
}

std::string_view to_string(BinaryLabel label) {
  if (label.axis == Axis::Valence) return label.sign == Sign::Positive ? "positive" : "negative";
  return label.sign == Sign::Positive ? "high" : "low";
}

std::optional<Quadrant> parse_quadrant(std::string_view text) {
  for (Quadrant q : kAllQuadrants) {
    if (to_string(q) == text) return q;
  }
  return std::nullopt;
}

std::optional<LabelSpace> parse_label_space(std::string_view text) {
  for (LabelSpace s : {LabelSpace::Quadrants, LabelSpace::Valence, LabelSpace::Arousal}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

const LabelSet& quadrant_labels() {
  static const LabelSet labels = {"Q1", "Q2", "Q3", "Q4"};
  return labels;
}

const LabelSet& labels_for(LabelSpace space) {
  static const LabelSet valence = {"positive", "negative"};
  static const LabelSet arousal = {"high", "low"};
  switch (space) {
    case LabelSpace::Quadrants: return quadrant_labels();
    case LabelSpace::Valence: return valence;
    case LabelSpace::Arousal: return arousal;
  }
  return quadrant_labels();
}

Quadrant quadrant_of(const VAPoint& p, double midpoint) {
  if (!std::isfinite(p.valence) || !std::isfinite(p.arousal) || !std::isfinite(midpoint)) {
    throw InvalidArgument("quadrant_of requires finite inputs");
  }
  if (p.valence == midpoint || p.arousal == midpoint) {
    throw AmbiguousPoint("point (" + std::to_string(p.valence) + ", " + std::to_string(p.arousal) +
                         ") lies on a midline at " + std::to_string(midpoint));
  }
  const bool pos_v = p.valence > midpoint;
  const bool pos_a = p.arousal > midpoint;
  if (pos_v) return pos_a ? Quadrant::Q1 : Quadrant::Q4;
  return pos_a ? Quadrant::Q2 : Quadrant::Q3;
}

BinaryLabel project_quadrant(Quadrant q, Axis axis) {
  bool positive = false;
  if (axis == Axis::Valence) {
    positive = q == Quadrant::Q1 || q == Quadrant::Q4;
  } else {
    positive = q == Quadrant::Q1 || q == Quadrant::Q2;
  }
  return {axis, positive ? Sign::Positive : Sign::Negative};
}

Label label_in_space(Quadrant q, LabelSpace space) {
  switch (space) {
    case LabelSpace::Quadrants: return Label(to_string(q));
    case LabelSpace::Valence: return Label(to_string(project_quadrant(q, Axis::Valence)));
    case LabelSpace::Arousal: return Label(to_string(project_quadrant(q, Axis::Arousal)));
  }
  return {};
}

ClassDistribution::ClassDistribution(LabelSet labels, std::vector<double> probs)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
  if (labels_.empty()) throw DistributionInvalid("label set is empty");
  if (labels_.size() != probs_.size()) {
    throw DistributionInvalid("label count " + std::to_string(labels_.size()) +
                              " does not match probability count " + std::to_string(probs_.size()));
  }
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw DistributionInvalid("duplicate label '" + l + "'");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw DistributionInvalid("probability for '" + labels_[i] + "' is outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kAcceptTolerance) {
    throw DistributionInvalid("probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& p : probs_) p /= sum;
  }
}

ClassDistribution ClassDistribution::from_scores(LabelSet labels, std::span<const double> scores) {
  double sum = 0.0;
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0) throw DistributionInvalid("scores must be finite and non-negative");
    sum += s;
  }
  if (!(sum > 0.0)) throw DistributionInvalid("scores have zero total mass");
  std::vector<double> probs(scores.begin(), scores.end());
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& p : probs) p /= sum;
  }
  return ClassDistribution(std::move(labels), std::move(probs));
}

double ClassDistribution::prob(std::string_view label) const {
  auto i = index_of(label);
  if (!i) throw UnknownLabel("label '" + std::string(label) + "' not in distribution");
  return probs_[*i];
}

std::optional<std::size_t> ClassDistribution::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t ClassDistribution::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

double ClassDistribution::max_prob() const { return probs_[argmax()]; }

bool ClassDistribution::same_label_set(const ClassDistribution& other) const {
  if (labels_.size() != other.labels_.size()) return false;
  return std::all_of(labels_.begin(), labels_.end(),
                     [&](const Label& l) { return other.index_of(l).has_value(); });
}

ClassDistribution ClassDistribution::reordered(const LabelSet& order) const {
  if (order.size() != labels_.size()) throw WrongLabelSet("reorder target has a different size");
  std::vector<double> probs;
  probs.reserve(order.size());
  for (const auto& l : order) {
    auto i = index_of(l);
    if (!i) throw WrongLabelSet("label '" + l + "' not present in distribution");
    probs.push_back(probs_[*i]);
  }
  return ClassDistribution(order, std::move(probs));
}

ClassDistribution marginalize(const ClassDistribution& d, Axis axis) {
  if (detect_label_space(d.labels()) != LabelSpace::Quadrants) {
    throw WrongLabelSet("marginalize needs a distribution over Q1..Q4");
  }
  // Sum in fixed quadrant order so the result does not depend on storage order.
  double positive = 0.0;
  double negative = 0.0;
  for (Quadrant q : kAllQuadrants) {
    const double p = d.prob(to_string(q));
    if (project_quadrant(q, axis).sign == Sign::Positive) {
      positive += p;
    } else {
      negative += p;
    }
  }
  const LabelSpace space = axis == Axis::Valence ? LabelSpace::Valence : LabelSpace::Arousal;
  const std::array<double, 2> scores = {positive, negative};
  return ClassDistribution::from_scores(labels_for(space), scores);
}

ClassDistribution to_label_space(const ClassDistribution& d, LabelSpace space) {
  const auto current = detect_label_space(d.labels());
  if (current == space) return d.reordered(labels_for(space));
  if (current == LabelSpace::Quadrants) {
    return marginalize(d, space == LabelSpace::Valence ? Axis::Valence : Axis::Arousal);
  }
  throw WrongLabelSet("cannot express distribution in the " + std::string(to_string(space)) +
                      " label space");
}

std::optional<LabelSpace> detect_label_space(const LabelSet& labels) {
  for (LabelSpace s : {LabelSpace::Quadrants, LabelSpace::Valence, LabelSpace::Arousal}) {
    const auto& want = labels_for(s);
    if (want.size() != labels.size()) continue;
    if (std::is_permutation(want.begin(), want.end(), labels.begin())) return s;
  }
  return std::nullopt;
}

}  // namespace musent
