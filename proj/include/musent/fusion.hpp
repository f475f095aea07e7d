#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "musent/core_model.hpp"
#include "musent/eval.hpp"

namespace musent {

enum class FusionStrategy { MaxProbability, Average, Weighted };
enum class TieBreak { PreferText, PreferAudio, Error };
enum class Modality { Audio, Text, Combined };

std::optional<FusionStrategy> parse_fusion_strategy(std::string_view text);  // max|average|weighted
std::string_view to_string(FusionStrategy s);
std::optional<TieBreak> parse_tie_break(std::string_view text);  // prefer-text|prefer-audio|error
std::string_view to_string(TieBreak t);
std::string_view to_string(Modality m);

/// Strategy plus its parameters. Use the factory functions; the audio weight
/// exists only for the weighted strategy.
class FusionConfig {
 public:
  static FusionConfig max_probability(TieBreak tie = TieBreak::PreferText);
  static FusionConfig average(TieBreak tie = TieBreak::PreferText);
  /// Throws WeightOutOfRange unless 0 <= audio_weight <= 1.
  static FusionConfig weighted(double audio_weight, TieBreak tie = TieBreak::PreferText);

  FusionStrategy strategy() const { return strategy_; }
  std::optional<double> audio_weight() const { return audio_weight_; }
  TieBreak tie_break() const { return tie_break_; }

 private:
  FusionConfig(FusionStrategy s, std::optional<double> w, TieBreak t)
      : strategy_(s), audio_weight_(w), tie_break_(t) {}

  FusionStrategy strategy_;
  std::optional<double> audio_weight_;
  TieBreak tie_break_;
};

struct FusionOutcome {
  Label label;
  std::size_t label_index = 0;
  /// Set for average and weighted fusion only.
  std::optional<ClassDistribution> fused;
  /// Audio or Text under max-probability fusion, Combined otherwise.
  Modality chosen = Modality::Combined;
};

/// Takes the argmax of whichever modality is more confident. Equal maxima
/// are settled by `tie`; TieBreak::Error throws TieError. A modality's own
/// argmax ties go to the lowest label index.
FusionOutcome fuse_max(const ClassDistribution& audio, const ClassDistribution& text,
                       TieBreak tie = TieBreak::PreferText);

/// Elementwise mean, then argmax. When several classes share the top fused
/// probability, `tie` picks the one its preferred modality rates highest.
FusionOutcome fuse_average(const ClassDistribution& audio, const ClassDistribution& text,
                           TieBreak tie = TieBreak::PreferText);

/// audio_weight * audio + (1 - audio_weight) * text, then argmax with the same
/// tie handling as fuse_average.
FusionOutcome fuse_weighted(const ClassDistribution& audio, const ClassDistribution& text,
                            double audio_weight, TieBreak tie = TieBreak::PreferText);

FusionOutcome fuse(const ClassDistribution& audio, const ClassDistribution& text, const FusionConfig& config);

/// One song with both modalities expressed over the same label set, in the
/// same order, plus its gold label when known.
struct PairedPrediction {
  std::string song_id;
  ClassDistribution audio;
  ClassDistribution text;
  std::optional<Label> gold;
};

struct SweepPoint {
  double weight = 0.0;
  double score = 0.0;
};

struct SweepResult {
  double best_weight = 0.0;
  double best_score = 0.0;
  std::vector<SweepPoint> curve;
  std::size_t evaluated_records = 0;
};

struct SweepOptions {
  double grid_step = 0.05;
  ScoreMetric metric = ScoreMetric::MacroF1;
  TieBreak tie = TieBreak::PreferText;
  ZeroDivision zero_division = ZeroDivision::Zero;
};

inline constexpr double kDefaultGridStep = 0.05;

/// Number of grid intervals for `grid_step`; throws InvalidArgument unless
/// the step divides [0, 1] evenly (to within 1e-9).
std::size_t grid_intervals(double grid_step);

/// Scores fuse_weighted at w = i / n for i = 0..n over the records that carry
/// a gold label. The best weight is the lowest w reaching the top score.
/// Throws EmptyDataset if no record has a gold label.
SweepResult sweep_weights(std::span<const PairedPrediction> records, const SweepOptions& options = {});

struct SelectionProportions {
  double audio = 0.0;
  double text = 0.0;
  std::size_t audio_count = 0;
  std::size_t text_count = 0;
};

/// Share of records whose max-probability fusion took the audio or the text
/// label. Throws EmptyDataset for an empty span.
SelectionProportions selection_proportions(std::span<const PairedPrediction> records,
                                           TieBreak tie = TieBreak::PreferText);

/// Fused labels of all records, and metrics over those with gold labels.
struct FusionRun {
  std::vector<FusionOutcome> outcomes;
  std::optional<MetricsReport> report;
};
FusionRun fuse_all(std::span<const PairedPrediction> records, const FusionConfig& config,
                   ZeroDivision zero_division = ZeroDivision::Zero);

}  // namespace musent
