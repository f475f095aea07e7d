#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "musent/core_model.hpp"

namespace musent {

struct LexiconEntry {
  std::string word;  // trimmed, lowercase, non-empty
  double valence_mean = 0.0;
  double arousal_mean = 0.0;
  std::optional<double> valence_sd;
  std::optional<double> arousal_sd;
};

/// Column names and rating scale of an ANEW-style ratings file. Names are
/// matched case-insensitively against the header row.
struct LexiconSchema {
  std::string word_column = "word";
  std::string valence_column = "valence_mean";
  std::string arousal_column = "arousal_mean";
  std::optional<std::string> valence_sd_column;
  std::optional<std::string> arousal_sd_column;
  double scale_min = 1.0;
  double scale_max = 9.0;
  /// Neutral point; (scale_min + scale_max) / 2 when unset.
  std::optional<double> midpoint;
  /// Comma or tab, detected from the header when unset.
  std::optional<char> delimiter;
};

/// Word-keyed affective ratings with a declared scale.
class Lexicon {
 public:
  /// Throws InvalidArgument unless scale_min < midpoint < scale_max, and
  /// DuplicateWord / OutOfScaleRating / ParseError for bad entries.
  Lexicon(std::vector<LexiconEntry> entries, double scale_min, double scale_max, double midpoint);

  const LexiconEntry* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  double scale_min() const { return scale_min_; }
  double scale_max() const { return scale_max_; }
  double midpoint() const { return midpoint_; }
  const std::map<std::string, LexiconEntry, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, LexiconEntry, std::less<>> entries_;
  double scale_min_;
  double scale_max_;
  double midpoint_;
};

Lexicon load_lexicon(const std::filesystem::path& path, const LexiconSchema& schema = {});

/// Words of a term: lowercased, split on whitespace and hyphens.
std::vector<std::string> term_words(std::string_view term);

/// Mean rating of the words of `term` that the lexicon knows. A term that is
/// itself an entry is looked up whole. Throws NotInLexicon when no word is
/// found.
struct TermRating {
  VAPoint point;
  std::size_t words_found = 0;
  std::size_t words_total = 0;
};
TermRating term_rating(const Lexicon& lex, std::string_view term);

/// Quadrant of `term` at the lexicon midpoint. Case-insensitive.
Quadrant term_quadrant(const Lexicon& lex, std::string_view term);

// ---------------------------------------------------------------------------
// Mapping tables

struct Excluded {
  friend bool operator==(Excluded, Excluded) { return true; }
};
struct Unmapped {
  friend bool operator==(Unmapped, Unmapped) { return true; }
};
using MappingDecision = std::variant<Quadrant, Excluded, Unmapped>;

enum class Provenance { LexiconDerived, ManualOverride, ManualExclusion };

std::string decision_to_string(const MappingDecision& d);
std::optional<MappingDecision> parse_decision(std::string_view text);
std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view text);

struct MappingRule {
  std::string term;
  MappingDecision decision;
  Provenance provenance = Provenance::LexiconDerived;

  friend bool operator==(const MappingRule&, const MappingRule&) = default;
};

/// Term rules, one per term, kept sorted by term.
class MappingTable {
 public:
  MappingTable() = default;
  /// Throws InvalidArgument if a term repeats.
  explicit MappingTable(std::vector<MappingRule> rules);

  const std::vector<MappingRule>& rules() const { return rules_; }
  const MappingRule* find(std::string_view term) const;
  bool empty() const { return rules_.empty(); }
  std::size_t size() const { return rules_.size(); }

  friend bool operator==(const MappingTable&, const MappingTable&) = default;

 private:
  std::vector<MappingRule> rules_;
};

/// Reads the {term, decision, provenance} table format. The provenance column
/// is optional; missing provenance is inferred from the decision
/// (excluded -> manual-exclusion, quadrant -> manual-override).
MappingTable load_mapping_table(const std::filesystem::path& path);
/// Tab-separated, header `term\tdecision\tprovenance`, one rule per line.
std::string format_mapping_table(const MappingTable& table);

struct MappingDiagnostic {
  std::string term;
  std::string message;
};

struct MappingResult {
  MappingTable table;
  std::vector<MappingDiagnostic> diagnostics;

  std::vector<std::string> unmapped_terms() const;
};

/// Maps every vocabulary term: override and exclusion rules win, otherwise the
/// lexicon decides. Terms the lexicon cannot place (missing, or exactly on a
/// midline) become Unmapped rows with a diagnostic. Output is sorted by term
/// and independent of vocabulary order; duplicate terms collapse.
MappingResult build_mapping_table(const std::vector<std::string>& vocabulary, const Lexicon& lex,
                                  const MappingTable& overrides);

/// A vocabulary file: one term per line, `#` comments and blank lines ignored.
std::vector<std::string> load_vocabulary(const std::filesystem::path& path);

/// The MIREX mood clusters, each an ordered list of adjective entries as they
/// appear in the source table ("amiable/good-natured" kept intact).
struct MoodCluster {
  std::string name;
  std::vector<std::string> entries;
};

/// Reads `cluster<TAB>comma-separated adjectives` rows with a header.
std::vector<MoodCluster> load_mood_clusters(const std::filesystem::path& path);

/// Terms of a cluster entry: "tense/anxious" gives {"tense", "anxious"}.
/// Hyphenated words stay whole here; term_rating splits them on lookup.
std::vector<std::string> split_cluster_entry(std::string_view entry);

enum class ClusterMapping {
  PerAdjective,  // each adjective placed by its own rating
  PerCluster,    // every adjective takes the quadrant of its cluster's mean rating
};

MappingResult map_mirex_cluster_terms(const std::vector<MoodCluster>& clusters, const Lexicon& lex,
                                      const MappingTable& overrides = {},
                                      ClusterMapping mode = ClusterMapping::PerAdjective);

}  // namespace musent
