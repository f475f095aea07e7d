#include "musent/fusion.hpp"

#include <cmath>

#include "musent/errors.hpp"

namespace musent {

std::optional<FusionStrategy> parse_fusion_strategy(std::string_view text) {
  for (auto s : {FusionStrategy::MaxProbability, FusionStrategy::Average, FusionStrategy::Weighted}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view to_string(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::MaxProbability: return "max";
    case FusionStrategy::Average: return "average";
    case FusionStrategy::Weighted: return "weighted";
  }
  return "?";
}

std::optional<TieBreak> parse_tie_break(std::string_view text) {
  for (auto t : {TieBreak::PreferText, TieBreak::PreferAudio, TieBreak::Error}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

std::string_view to_string(TieBreak t) {
  switch (t) {
    case TieBreak::PreferText: return "prefer-text";
    case TieBreak::PreferAudio: return "prefer-audio";
    case TieBreak::Error: return "error";
  }
  return "?";
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Audio: return "audio";
    case Modality::Text: return "text";
    case Modality::Combined: return "combined";
  }
  return "?";
}

FusionConfig FusionConfig::max_probability(TieBreak tie) {
  return {FusionStrategy::MaxProbability, std::nullopt, tie};
}

FusionConfig FusionConfig::average(TieBreak tie) { return {FusionStrategy::Average, std::nullopt, tie}; }

FusionConfig FusionConfig::weighted(double audio_weight, TieBreak tie) {
  if (!(audio_weight >= 0.0 && audio_weight <= 1.0)) {
    throw WeightOutOfRange("audio weight " + std::to_string(audio_weight) + " outside [0, 1]");
  }
  return {FusionStrategy::Weighted, audio_weight, tie};
}

namespace {

// Text expressed in audio's label order.
ClassDistribution align(const ClassDistribution& audio, const ClassDistribution& text) {
  if (audio.labels() == text.labels()) return text;
  if (!audio.same_label_set(text)) throw MixedLabelSets("audio and text distributions use different label sets");
  return text.reordered(audio.labels());
}

// Argmax of a combined score vector. Exact ties among top classes go to the
// class the preferred modality rates highest, falling back to the other
// modality when the preferred one carries no weight, then to the lowest index.
std::size_t resolve_argmax(const std::vector<double>& fused, const ClassDistribution& audio,
                           const ClassDistribution& text, double audio_weight, TieBreak tie) {
  double best = fused[0];
  for (double v : fused) best = std::max(best, v);
  std::vector<std::size_t> top;
  for (std::size_t i = 0; i < fused.size(); ++i) {
    if (fused[i] == best) top.push_back(i);
  }
  if (top.size() == 1) return top.front();
  if (tie == TieBreak::Error) throw TieError("fused distribution has tied top classes");

  const ClassDistribution* ranker = tie == TieBreak::PreferText ? &text : &audio;
  if (tie == TieBreak::PreferText && audio_weight == 1.0) ranker = &audio;
  if (tie == TieBreak::PreferAudio && audio_weight == 0.0) ranker = &text;
  std::size_t pick = top.front();
  for (std::size_t i : top) {
    if (ranker->prob(i) > ranker->prob(pick)) pick = i;
  }
  return pick;
}

FusionOutcome combine(const ClassDistribution& audio, const ClassDistribution& aligned_text,
                      double audio_weight, double text_weight, TieBreak tie) {
  std::vector<double> scores(audio.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = audio_weight * audio.prob(i) + text_weight * aligned_text.prob(i);
  }
  FusionOutcome out;
  out.label_index = resolve_argmax(scores, audio, aligned_text, audio_weight, tie);
  out.label = audio.labels()[out.label_index];
  out.fused = ClassDistribution::from_scores(audio.labels(), scores);
  out.chosen = Modality::Combined;
  return out;
}

}  // namespace

FusionOutcome fuse_max(const ClassDistribution& audio, const ClassDistribution& text, TieBreak tie) {
  const ClassDistribution t = align(audio, text);
  const double a_star = audio.max_prob();
  const double t_star = t.max_prob();
  Modality pick;
  if (a_star > t_star) {
    pick = Modality::Audio;
  } else if (t_star > a_star) {
    pick = Modality::Text;
  } else if (tie == TieBreak::Error) {
    throw TieError("audio and text are equally confident");
  } else {
    pick = tie == TieBreak::PreferText ? Modality::Text : Modality::Audio;
  }
  const ClassDistribution& source = pick == Modality::Audio ? audio : t;
  FusionOutcome out;
  out.label_index = source.argmax();
  out.label = audio.labels()[out.label_index];
  out.chosen = pick;
  return out;
}

FusionOutcome fuse_average(const ClassDistribution& audio, const ClassDistribution& text, TieBreak tie) {
  // Halving is exact in binary floating point, so 0.5a + 0.5t is the mean.
  return combine(audio, align(audio, text), 0.5, 0.5, tie);
}

FusionOutcome fuse_weighted(const ClassDistribution& audio, const ClassDistribution& text, double audio_weight,
                            TieBreak tie) {
  if (!(audio_weight >= 0.0 && audio_weight <= 1.0)) {
    throw WeightOutOfRange("audio weight " + std::to_string(audio_weight) + " outside [0, 1]");
  }
  const ClassDistribution t = align(audio, text);
  return combine(audio, t, audio_weight, 1.0 - audio_weight, tie);
}

FusionOutcome fuse(const ClassDistribution& audio, const ClassDistribution& text, const FusionConfig& config) {
  switch (config.strategy()) {
    case FusionStrategy::MaxProbability: return fuse_max(audio, text, config.tie_break());
    case FusionStrategy::Average: return fuse_average(audio, text, config.tie_break());
    case FusionStrategy::Weighted: return fuse_weighted(audio, text, *config.audio_weight(), config.tie_break());
  }
  throw InvalidArgument("unknown fusion strategy");
}

std::size_t grid_intervals(double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 1.0)) throw InvalidArgument("grid step must be in (0, 1]");
  const double raw = 1.0 / grid_step;
  const auto n = static_cast<std::size_t>(std::llround(raw));
  if (n == 0 || std::abs(static_cast<double>(n) * grid_step - 1.0) > 1e-9) {
    throw InvalidArgument("grid step " + std::to_string(grid_step) + " does not divide [0, 1] evenly");
  }
  return n;
}

SweepResult sweep_weights(std::span<const PairedPrediction> records, const SweepOptions& options) {
  const std::size_t n = grid_intervals(options.grid_step);

  std::vector<const PairedPrediction*> gold;
  for (const auto& r : records) {
    if (r.gold) gold.push_back(&r);
  }
  if (gold.empty()) throw EmptyDataset("no gold-labelled records to sweep over");
  const LabelSet& labels = gold.front()->audio.labels();
  std::vector<Label> golds;
  golds.reserve(gold.size());
  for (const auto* r : gold) {
    if (r->audio.labels() != labels) throw MixedLabelSets("sweep records use different label sets");
    golds.push_back(*r->gold);
  }

  SweepResult result;
  result.evaluated_records = gold.size();
  result.curve.reserve(n + 1);
  std::vector<Label> preds(gold.size());
  for (std::size_t i = 0; i <= n; ++i) {
    const double w = static_cast<double>(i) / static_cast<double>(n);
    for (std::size_t k = 0; k < gold.size(); ++k) {
      preds[k] = fuse_weighted(gold[k]->audio, gold[k]->text, w, options.tie).label;
    }
    const double s = score(metrics(confusion(golds, preds, labels), options.zero_division), options.metric);
    result.curve.push_back({w, s});
    if (i == 0 || s > result.best_score) {
      result.best_score = s;
      result.best_weight = w;
    }
  }
  return result;
}

SelectionProportions selection_proportions(std::span<const PairedPrediction> records, TieBreak tie) {
  if (records.empty()) throw EmptyDataset("no records for selection proportions");
  SelectionProportions out;
  for (const auto& r : records) {
    if (fuse_max(r.audio, r.text, tie).chosen == Modality::Audio) {
      ++out.audio_count;
    } else {
      ++out.text_count;
    }
  }
  const auto total = static_cast<double>(records.size());
  out.audio = static_cast<double>(out.audio_count) / total;
  out.text = static_cast<double>(out.text_count) / total;
  return out;
}

FusionRun fuse_all(std::span<const PairedPrediction> records, const FusionConfig& config,
                   ZeroDivision zero_division) {
  FusionRun run;
  run.outcomes.reserve(records.size());
  std::vector<Label> golds;
  std::vector<Label> preds;
  for (const auto& r : records) {
    run.outcomes.push_back(fuse(r.audio, r.text, config));
    if (r.gold) {
      golds.push_back(*r.gold);
      preds.push_back(run.outcomes.back().label);
    }
  }
  if (!golds.empty()) {
    run.report = metrics(confusion(golds, preds, records.front().audio.labels()), zero_division);
  }
  return run;
}

}  // namespace musent
