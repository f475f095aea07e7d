#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "musent/chunker.hpp"
#include "musent/core_model.hpp"
#include "musent/fusion.hpp"
#include "musent/lexicon.hpp"

namespace musent {

// ---------------------------------------------------------------------------
// Manifest

/// Where a record's gold quadrant came from, and whether it is usable.
enum class GoldStatus {
  None,       // nothing to derive a gold label from
  Ok,         // gold_quadrant is set and evaluable
  Ambiguous,  // VA point on a midline
  Excluded,   // every mood term is excluded by the mapping
  Unmapped,   // no mood term is covered by the mapping
  Tied,       // mood terms split evenly between quadrants
};
std::string_view to_string(GoldStatus s);

struct SongRecord {
  std::string song_id;
  std::optional<std::string> title;
  std::optional<std::string> artist;
  std::optional<Quadrant> gold_quadrant;
  std::optional<VAPoint> gold_va;
  std::vector<std::string> mood_terms;
  std::optional<std::string> audio_path;
  std::optional<std::string> lyrics_path;
  std::optional<std::string> genre;
  std::optional<std::string> year;
  bool has_audio = false;
  bool has_lyrics = false;
  GoldStatus gold_status = GoldStatus::None;

  bool evaluable() const { return gold_status == GoldStatus::Ok && gold_quadrant.has_value(); }
};

struct ManifestOptions {
  /// Comma or tab, detected from the header when unset.
  std::optional<char> delimiter;
  /// Translates values of the optional `quadrant` column into quadrants, for
  /// datasets that number them differently. Empty means Q1..Q4 verbatim.
  std::map<std::string, Quadrant> quadrant_remap;
  /// When set, records with valence/arousal get their gold quadrant at load.
  std::optional<double> va_midpoint;
};

/// Reads a delimited manifest. `song_id` is required; recognized optional
/// columns are title, artist, valence, arousal, quadrant, mood_terms
/// (semicolon-separated), audio_path, lyrics_path, genre and year. Throws
/// ParseError for a missing song_id column or a malformed value and
/// DuplicateSongId for a repeated id.
std::vector<SongRecord> load_manifest(const std::filesystem::path& path, const ManifestOptions& options = {});

struct RecordDiagnostic {
  std::string song_id;
  std::string message;
};

struct NormalizationResult {
  std::vector<SongRecord> records;
  std::vector<RecordDiagnostic> diagnostics;

  std::size_t count(GoldStatus s) const;
};

/// Sets gold_quadrant = quadrant_of(gold_va, midpoint) on records with a VA
/// point. Midline points are flagged Ambiguous and lose any gold quadrant;
/// they stay in the record list. gold_va is never modified.
NormalizationResult normalize_va_annotations(std::vector<SongRecord> records, double midpoint);

/// Resolves mood terms through `mapping` by majority over the terms that map
/// to a quadrant. Excluded and unmapped terms do not vote; a record with no
/// voting term is flagged Excluded (if any term was excluded) or Unmapped, and
/// an even split between quadrants is flagged Tied.
NormalizationResult normalize_categorical_annotations(std::vector<SongRecord> records,
                                                      const MappingTable& mapping);

/// Writes records back out as a comma-separated manifest including the
/// derived `quadrant` and `gold_status` columns.
std::string format_manifest(const std::vector<SongRecord>& records);

// ---------------------------------------------------------------------------
// Predictions

enum class PredictionModality { Audio, Text };
std::string_view to_string(PredictionModality m);

struct ChunkDetail {
  ChunkPlan plan;
  std::vector<ClassDistribution> chunk_dists;

  friend bool operator==(const ChunkDetail&, const ChunkDetail&) = default;
};

struct PredictionRecord {
  std::string song_id;
  PredictionModality modality = PredictionModality::Audio;
  std::string model_id;
  ClassDistribution distribution;
  std::optional<ChunkDetail> chunk_detail;
  std::optional<std::string> tokenizer_id;

  const LabelSet& labels() const { return distribution.labels(); }
  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

inline constexpr std::string_view kPredictionsSchemaVersion = "1";

struct LoadedPredictions {
  std::vector<PredictionRecord> records;
  /// Non-fatal findings, each prefixed with a JSON path.
  std::vector<std::string> warnings;
};

/// Parses and validates a predictions document. Structural problems throw
/// SchemaError and bad probability vectors throw DistributionInvalid; both
/// messages start with the JSON path of the offending value, e.g.
/// `$.records[2].probs[1]`. A recorded distribution that none of the chunk
/// aggregation rules reproduces from its chunks is a warning.
LoadedPredictions parse_predictions(std::string_view json_text, std::string_view source = "<memory>");
LoadedPredictions load_predictions(const std::filesystem::path& path);

/// Canonical JSON for a set of records; parse_predictions reads it back to
/// equal records.
std::string serialize_predictions(const std::vector<PredictionRecord>& records);

// ---------------------------------------------------------------------------
// Joining

struct JoinReport {
  std::size_t paired = 0;
  std::size_t paired_with_gold = 0;
  std::vector<std::string> audio_only;
  std::vector<std::string> text_only;
  std::vector<std::string> unknown_song;        // predictions for ids missing from the manifest
  std::vector<std::string> duplicate;           // "song_id/modality", later copies ignored
  std::vector<std::string> incompatible_labels;  // pairs whose label sets could not be reconciled
  std::size_t marginalized = 0;                 // pairs where a quadrant side was folded to binary
};

struct JoinResult {
  std::vector<PairedPrediction> pairs;
  JoinReport report;
};

/// Inner join of audio and text predictions on song_id, in manifest order.
/// With `space` set, both sides are expressed in that label space. Without
/// it, a quadrant side facing a binary side is marginalized onto the binary
/// axis and matching sets are aligned to canonical order.
JoinResult join_modalities(const std::vector<SongRecord>& songs, const std::vector<PredictionRecord>& predictions,
                           std::optional<LabelSpace> space = std::nullopt);

/// Gold and predicted labels of one modality in `space`, for songs that have
/// both a usable gold label and a prediction.
struct EvaluationSet {
  LabelSet labels;
  std::vector<std::string> song_ids;
  std::vector<Label> golds;
  std::vector<Label> preds;
  std::size_t skipped_no_gold = 0;
  std::size_t skipped_no_prediction = 0;
  std::size_t skipped_label_space = 0;
};
EvaluationSet collect_evaluation(const std::vector<SongRecord>& songs,
                                 const std::vector<PredictionRecord>& predictions, PredictionModality modality,
                                 LabelSpace space);

}  // namespace musent
