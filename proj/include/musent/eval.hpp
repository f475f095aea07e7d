#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "musent/core_model.hpp"

namespace musent {

/// Rows are gold labels, columns are predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(LabelSet labels);

  /// Throws UnknownLabel if either label is outside the set.
  void add(std::string_view gold, std::string_view predicted);

  const LabelSet& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::uint64_t count(std::size_t gold, std::size_t predicted) const {
    return counts_[gold * labels_.size() + predicted];
  }
  std::uint64_t count(std::string_view gold, std::string_view predicted) const;
  std::uint64_t total() const { return total_; }
  std::uint64_t trace() const;
  std::size_t index_of(std::string_view label) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  LabelSet labels_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Counts (gold, predicted) pairs. Throws LengthMismatch when the lists differ
/// in length and UnknownLabel for labels outside `labels`.
ConfusionMatrix confusion(std::span<const Label> golds, std::span<const Label> preds,
                          const LabelSet& labels);

enum class ZeroDivision {
  Zero,  // undefined precision/recall reported as 0, class flagged
  Skip,  // undefined values reported as 0, flagged, and left out of the macro mean
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;    // gold count
  std::uint64_t predicted = 0;  // prediction count
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct AverageMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  LabelSet labels;
  std::map<Label, ClassMetrics> per_class;
  AverageMetrics macro;
  /// Pooled counts; for single-label data all three equal accuracy.
  AverageMetrics micro;
  double accuracy = 0.0;
  std::uint64_t total = 0;
  ZeroDivision zero_division = ZeroDivision::Zero;

  /// Labels with an undefined precision or recall.
  std::vector<Label> flagged() const;
};

MetricsReport metrics(const ConfusionMatrix& cm, ZeroDivision zero_division = ZeroDivision::Zero);

/// The scalar a weight sweep maximizes.
enum class ScoreMetric { MacroF1, MicroF1, Accuracy };

std::optional<ScoreMetric> parse_score_metric(std::string_view text);
std::string_view to_string(ScoreMetric m);
double score(const MetricsReport& report, ScoreMetric metric);

}  // namespace musent
