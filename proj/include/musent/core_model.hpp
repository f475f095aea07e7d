#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace musent {

/// A coordinate in the valence/arousal plane, in the units of whatever rating
/// scale produced it (1..9 for ANEW, signed for some annotated datasets).
struct VAPoint {
  double valence = 0.0;
  double arousal = 0.0;

  /// Throws InvalidArgument unless both coordinates are finite.
  VAPoint(double valence, double arousal);
  VAPoint() = default;

  friend bool operator==(const VAPoint&, const VAPoint&) = default;
};

/// Q1 = (+v,+a), Q2 = (-v,+a), Q3 = (-v,-a), Q4 = (+v,-a).
enum class Quadrant { Q1, Q2, Q3, Q4 };

inline constexpr std::array<Quadrant, 4> kAllQuadrants = {Quadrant::Q1, Quadrant::Q2, Quadrant::Q3,
                                                         Quadrant::Q4};

enum class Axis { Valence, Arousal };
enum class Sign { Positive, Negative };

/// One side of a binary valence or arousal split. For arousal, Positive means
/// high arousal.
struct BinaryLabel {
  Axis axis = Axis::Valence;
  Sign sign = Sign::Positive;

  friend bool operator==(const BinaryLabel&, const BinaryLabel&) = default;
};

/// Label spaces that gold annotations and model outputs can be expressed in.
enum class LabelSpace { Quadrants, Valence, Arousal };

using Label = std::string;
using LabelSet = std::vector<Label>;

std::string_view to_string(Quadrant q);
std::string_view to_string(Axis axis);
std::string_view to_string(LabelSpace space);
/// "positive"/"negative" on the valence axis, "high"/"low" on the arousal axis.
std::string_view to_string(BinaryLabel label);

std::optional<Quadrant> parse_quadrant(std::string_view text);
std::optional<LabelSpace> parse_label_space(std::string_view text);

/// Canonical label order for a space: Q1..Q4, (positive, negative), (high, low).
const LabelSet& labels_for(LabelSpace space);
const LabelSet& quadrant_labels();

/// Quadrant of `p` relative to the neutral point of its scale. Throws
/// AmbiguousPoint when either coordinate equals the midpoint exactly.
Quadrant quadrant_of(const VAPoint& p, double midpoint);

BinaryLabel project_quadrant(Quadrant q, Axis axis);

/// The label of quadrant `q` once projected into `space`.
Label label_in_space(Quadrant q, LabelSpace space);

/// A normalized probability vector over an ordered, duplicate-free label set.
///
/// Construction checks that every entry is in [0, 1] and that the mass is
/// within kAcceptTolerance of 1, then rescales so the sum is 1 to within
/// kSumTolerance. Inputs already summing to 1 within 1e-12 are kept bit-exact,
/// which makes load/serialize/load cycles stable.
class ClassDistribution {
 public:
  static constexpr double kAcceptTolerance = 1e-6;
  static constexpr double kSumTolerance = 1e-9;

  ClassDistribution(LabelSet labels, std::vector<double> probs);

  /// Normalizes arbitrary non-negative scores with positive total mass.
  static ClassDistribution from_scores(LabelSet labels, std::span<const double> scores);

  const LabelSet& labels() const { return labels_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  double prob(std::size_t i) const { return probs_.at(i); }
  /// Throws UnknownLabel if `label` is not in the set.
  double prob(std::string_view label) const;
  std::optional<std::size_t> index_of(std::string_view label) const;

  /// Index of the largest probability; the lowest index wins ties.
  std::size_t argmax() const;
  double max_prob() const;
  const Label& argmax_label() const { return labels_[argmax()]; }

  bool has_labels(const LabelSet& labels) const { return labels_ == labels; }
  /// True when both sets hold the same labels in any order.
  bool same_label_set(const ClassDistribution& other) const;

  /// The same distribution with its labels in `order`, which must be a
  /// permutation of labels(). Throws WrongLabelSet otherwise.
  ClassDistribution reordered(const LabelSet& order) const;

  friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;

 private:
  LabelSet labels_;
  std::vector<double> probs_;
};

/// Sums the two quadrants on each side of `axis`. `d` must be over exactly the
/// four quadrant labels, in any order; throws WrongLabelSet otherwise.
ClassDistribution marginalize(const ClassDistribution& d, Axis axis);

/// Expresses `d` in `space`: reorders when it already uses that label set,
/// marginalizes quadrant distributions into a binary space. Anything else is
/// a WrongLabelSet.
ClassDistribution to_label_space(const ClassDistribution& d, LabelSpace space);

/// The label space whose labels `labels` are a permutation of, if any.
std::optional<LabelSpace> detect_label_space(const LabelSet& labels);

}  // namespace musent
