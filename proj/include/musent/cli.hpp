#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "musent/eval.hpp"
#include "musent/fusion.hpp"
#include "musent/ingest.hpp"
#include "musent/lexicon.hpp"

namespace musent::cli {

/// How gold labels are derived from a manifest: the optional `quadrant`
/// column first, then mood terms through a mapping table, then VA values at
/// the given midpoint. Later sources overwrite earlier ones for a record.
struct GoldOptions {
  std::filesystem::path manifest;
  std::optional<double> midpoint;
  std::optional<std::filesystem::path> mapping;
  std::map<std::string, Quadrant> quadrant_remap;
};

struct MapTagsOptions {
  std::filesystem::path lexicon;
  LexiconSchema schema;
  std::optional<std::filesystem::path> vocabulary;
  std::optional<std::filesystem::path> mirex_clusters;
  std::optional<std::filesystem::path> overrides;
  ClusterMapping cluster_mapping = ClusterMapping::PerAdjective;
  std::filesystem::path out_dir;
};

struct NormalizeOptions {
  GoldOptions gold;
  std::filesystem::path out_dir;
};

struct EvaluateOptions {
  GoldOptions gold;
  std::optional<std::filesystem::path> audio_preds;
  std::optional<std::filesystem::path> text_preds;
  LabelSpace space = LabelSpace::Quadrants;
  ZeroDivision zero_division = ZeroDivision::Zero;
  std::filesystem::path out_dir;
};

struct FuseOptions {
  GoldOptions gold;
  std::filesystem::path audio_preds;
  std::filesystem::path text_preds;
  FusionConfig config = FusionConfig::max_probability();
  std::optional<LabelSpace> space;
  ZeroDivision zero_division = ZeroDivision::Zero;
  std::filesystem::path out_dir;
};

struct SweepCommandOptions {
  GoldOptions gold;
  std::filesystem::path audio_preds;
  std::filesystem::path text_preds;
  SweepOptions sweep;
  std::optional<LabelSpace> space;
  std::filesystem::path out_dir;
};

// Each command writes its outputs under out_dir and its diagnostics to `err`.
// Errors propagate as musent::Error.

/// Writes mapping.tsv.
MappingResult cmd_map_tags(const MapTagsOptions& options, std::ostream& err);
/// Writes manifest_normalized.csv and normalize_report.json.
NormalizationResult cmd_normalize(const NormalizeOptions& options, std::ostream& err);
/// Writes metrics_<modality>_<space>.json and .svg per given predictions file.
std::map<PredictionModality, MetricsReport> cmd_evaluate(const EvaluateOptions& options, std::ostream& err);
/// Writes fused.json, join_report.json, metrics_fused.json/.svg when gold
/// labels exist, and selection.json for max-probability fusion.
FusionRun cmd_fuse(const FuseOptions& options, std::ostream& err);
/// Writes sweep_curve.tsv, sweep_curve.svg, sweep_summary.json and join_report.json.
SweepResult cmd_sweep(const SweepCommandOptions& options, std::ostream& err);

/// Parses argv-style arguments (args[0] is the program name) and runs the
/// chosen subcommand. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace musent::cli
