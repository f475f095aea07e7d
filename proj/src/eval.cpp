#include "musent/eval.hpp"

#include <algorithm>
#include <set>

#include "musent/errors.hpp"

namespace musent {

ConfusionMatrix::ConfusionMatrix(LabelSet labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw InvalidArgument("confusion matrix needs at least one label");
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw InvalidArgument("duplicate label '" + l + "'");
  }
  counts_.assign(labels_.size() * labels_.size(), 0);
}

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw UnknownLabel("label '" + std::string(label) + "' is not in the label set");
  return static_cast<std::size_t>(it - labels_.begin());
}

void ConfusionMatrix::add(std::string_view gold, std::string_view predicted) {
  const auto g = index_of(gold);
  const auto p = index_of(predicted);
  ++counts_[g * labels_.size() + p];
  ++total_;
}

std::uint64_t ConfusionMatrix::count(std::string_view gold, std::string_view predicted) const {
  return count(index_of(gold), index_of(predicted));
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) t += count(i, i);
  return t;
}

ConfusionMatrix confusion(std::span<const Label> golds, std::span<const Label> preds,
                          const LabelSet& labels) {
  if (golds.size() != preds.size()) {
    throw LengthMismatch(std::to_string(golds.size()) + " gold labels but " + std::to_string(preds.size()) +
                         " predictions");
  }
  ConfusionMatrix cm(labels);
  for (std::size_t i = 0; i < golds.size(); ++i) cm.add(golds[i], preds[i]);
  return cm;
}

namespace {

double f1_of(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::vector<Label> MetricsReport::flagged() const {
  std::vector<Label> out;
  for (const auto& l : labels) {
    const auto& m = per_class.at(l);
    if (m.precision_undefined || m.recall_undefined) out.push_back(l);
  }
  return out;
}

MetricsReport metrics(const ConfusionMatrix& cm, ZeroDivision zero_division) {
  MetricsReport report;
  report.labels = cm.labels();
  report.total = cm.total();
  report.zero_division = zero_division;

  const std::size_t n = cm.size();
  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  std::size_t p_n = 0, r_n = 0, f_n = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::uint64_t tp = cm.count(c, c);
    std::uint64_t predicted = 0;
    std::uint64_t support = 0;
    for (std::size_t k = 0; k < n; ++k) {
      predicted += cm.count(k, c);
      support += cm.count(c, k);
    }
    ClassMetrics m;
    m.support = support;
    m.predicted = predicted;
    m.precision_undefined = predicted == 0;
    m.recall_undefined = support == 0;
    m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    m.f1 = f1_of(m.precision, m.recall);

    const bool skip = zero_division == ZeroDivision::Skip;
    if (!(skip && m.precision_undefined)) {
      p_sum += m.precision;
      ++p_n;
    }
    if (!(skip && m.recall_undefined)) {
      r_sum += m.recall;
      ++r_n;
    }
    if (!(skip && m.precision_undefined && m.recall_undefined)) {
      f_sum += m.f1;
      ++f_n;
    }
    report.per_class.emplace(cm.labels()[c], m);
  }
  report.macro.precision = p_n ? p_sum / static_cast<double>(p_n) : 0.0;
  report.macro.recall = r_n ? r_sum / static_cast<double>(r_n) : 0.0;
  report.macro.f1 = f_n ? f_sum / static_cast<double>(f_n) : 0.0;

  // Every record carries exactly one gold and one predicted label, so pooled
  // precision and recall both reduce to accuracy.
  report.accuracy = cm.total() ? static_cast<double>(cm.trace()) / static_cast<double>(cm.total()) : 0.0;
  report.micro = {report.accuracy, report.accuracy, report.accuracy};
  return report;
}

std::optional<ScoreMetric> parse_score_metric(std::string_view text) {
  for (auto m : {ScoreMetric::MacroF1, ScoreMetric::MicroF1, ScoreMetric::Accuracy}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::string_view to_string(ScoreMetric m) {
  switch (m) {
    case ScoreMetric::MacroF1: return "macro-f1";
    case ScoreMetric::MicroF1: return "micro-f1";
    case ScoreMetric::Accuracy: return "accuracy";
  }
  return "?";
}

double score(const MetricsReport& report, ScoreMetric metric) {
  switch (metric) {
    case ScoreMetric::MacroF1: return report.macro.f1;
    case ScoreMetric::MicroF1: return report.micro.f1;
    case ScoreMetric::Accuracy: return report.accuracy;
  }
  return 0.0;
}

}  // namespace musent
