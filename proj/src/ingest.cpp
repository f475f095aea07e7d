#include "musent/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "musent/delimited.hpp"
#include "musent/errors.hpp"

namespace musent {

using nlohmann::json;

std::string_view to_string(GoldStatus s) {
  switch (s) {
    case GoldStatus::None: return "none";
    case GoldStatus::Ok: return "ok";
    case GoldStatus::Ambiguous: return "ambiguous";
    case GoldStatus::Excluded: return "excluded";
    case GoldStatus::Unmapped: return "unmapped";
    case GoldStatus::Tied: return "tied";
  }
  return "?";
}

std::string_view to_string(PredictionModality m) {
  return m == PredictionModality::Audio ? "audio" : "text";
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::optional<std::string> optional_cell(const DelimitedTable& t, const DelimitedTable::Row& row,
                                         std::string_view column) {
  auto col = t.column(column);
  if (!col || row.cells[*col].empty()) return std::nullopt;
  return row.cells[*col];
}

}  // namespace

std::vector<SongRecord> load_manifest(const std::filesystem::path& path, const ManifestOptions& options) {
  const auto table = read_delimited(path, options.delimiter);
  const auto id_col = table.column("song_id");
  if (!id_col) throw ParseError(path.string() + ": missing required column 'song_id'");
  const bool has_v = table.column("valence").has_value();
  const bool has_a = table.column("arousal").has_value();
  if (has_v != has_a) throw ParseError(path.string() + ": valence and arousal columns must appear together");

  std::vector<SongRecord> records;
  std::set<std::string> ids;
  for (const auto& row : table.rows) {
    const std::string at = path.string() + ":" + std::to_string(row.line);
    SongRecord r;
    r.song_id = row.cells[*id_col];
    if (r.song_id.empty()) throw ParseError(at + ": empty song_id");
    if (!ids.insert(r.song_id).second) throw DuplicateSongId(at + ": duplicate song_id '" + r.song_id + "'");

    r.title = optional_cell(table, row, "title");
    r.artist = optional_cell(table, row, "artist");
    r.audio_path = optional_cell(table, row, "audio_path");
    r.lyrics_path = optional_cell(table, row, "lyrics_path");
    r.genre = optional_cell(table, row, "genre");
    r.year = optional_cell(table, row, "year");
    r.has_audio = r.audio_path.has_value();
    r.has_lyrics = r.lyrics_path.has_value();

    auto v = optional_cell(table, row, "valence");
    auto a = optional_cell(table, row, "arousal");
    if (v.has_value() != a.has_value()) throw ParseError(at + ": valence and arousal must both be set or both empty");
    if (v) {
      auto vv = parse_double(*v);
      auto aa = parse_double(*a);
      if (!vv || !aa) throw ParseError(at + ": non-numeric valence/arousal");
      r.gold_va = VAPoint(*vv, *aa);
    }

    if (auto q = optional_cell(table, row, "quadrant")) {
      std::optional<Quadrant> quadrant;
      if (options.quadrant_remap.empty()) {
        quadrant = parse_quadrant(*q);
      } else if (auto it = options.quadrant_remap.find(*q); it != options.quadrant_remap.end()) {
        quadrant = it->second;
      }
      if (!quadrant) throw ParseError(at + ": unknown quadrant '" + *q + "'");
      r.gold_quadrant = quadrant;
      r.gold_status = GoldStatus::Ok;
    }

    if (auto terms = optional_cell(table, row, "mood_terms")) {
      for (const auto& t : split(*terms, ';')) {
        auto term = to_lower(trim(t));
        if (!term.empty()) r.mood_terms.push_back(std::move(term));
      }
    }
    records.push_back(std::move(r));
  }

  if (options.va_midpoint) records = normalize_va_annotations(std::move(records), *options.va_midpoint).records;
  return records;
}

std::size_t NormalizationResult::count(GoldStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [s](const SongRecord& r) { return r.gold_status == s; }));
}

NormalizationResult normalize_va_annotations(std::vector<SongRecord> records, double midpoint) {
  NormalizationResult result;
  for (auto& r : records) {
    if (!r.gold_va) continue;
    try {
      r.gold_quadrant = quadrant_of(*r.gold_va, midpoint);
      r.gold_status = GoldStatus::Ok;
    } catch (const AmbiguousPoint& e) {
      r.gold_quadrant.reset();
      r.gold_status = GoldStatus::Ambiguous;
      result.diagnostics.push_back({r.song_id, e.what()});
    }
  }
  result.records = std::move(records);
  return result;
}

NormalizationResult normalize_categorical_annotations(std::vector<SongRecord> records,
                                                      const MappingTable& mapping) {
  NormalizationResult result;
  for (auto& r : records) {
    if (r.mood_terms.empty()) continue;
    std::array<std::size_t, 4> votes{};
    bool any_excluded = false;
    for (const auto& term : r.mood_terms) {
      const auto* rule = mapping.find(term);
      if (!rule) {
        result.diagnostics.push_back({r.song_id, "mood term '" + term + "' is not covered by the mapping"});
        continue;
      }
      if (const auto* q = std::get_if<Quadrant>(&rule->decision)) {
        ++votes[static_cast<std::size_t>(*q)];
      } else if (std::holds_alternative<Excluded>(rule->decision)) {
        any_excluded = true;
        result.diagnostics.push_back({r.song_id, "mood term '" + term + "' is excluded"});
      } else {
        result.diagnostics.push_back({r.song_id, "mood term '" + term + "' is unmapped"});
      }
    }
    const auto top = *std::max_element(votes.begin(), votes.end());
    r.gold_quadrant.reset();
    if (top == 0) {
      r.gold_status = any_excluded ? GoldStatus::Excluded : GoldStatus::Unmapped;
      continue;
    }
    if (std::count(votes.begin(), votes.end(), top) > 1) {
      r.gold_status = GoldStatus::Tied;
      result.diagnostics.push_back({r.song_id, "mood terms split evenly between quadrants"});
      continue;
    }
    r.gold_quadrant = kAllQuadrants[static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin())];
    r.gold_status = GoldStatus::Ok;
  }
  result.records = std::move(records);
  return result;
}

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string format_manifest(const std::vector<SongRecord>& records) {
  std::string out =
      "song_id,title,artist,valence,arousal,mood_terms,audio_path,lyrics_path,genre,year,quadrant,gold_status\n";
  auto opt = [](const std::optional<std::string>& s) { return escape_field(s.value_or(""), ','); };
  for (const auto& r : records) {
    std::string terms;
    for (std::size_t i = 0; i < r.mood_terms.size(); ++i) {
      if (i) terms += ';';
      terms += r.mood_terms[i];
    }
    out += escape_field(r.song_id, ',') + ',' + opt(r.title) + ',' + opt(r.artist) + ',';
    if (r.gold_va) out += format_number(r.gold_va->valence) + ',' + format_number(r.gold_va->arousal) + ',';
    else out += ",,";
    out += escape_field(terms, ',') + ',' + opt(r.audio_path) + ',' + opt(r.lyrics_path) + ',' + opt(r.genre) +
           ',' + opt(r.year) + ',';
    if (r.gold_quadrant) out += to_string(*r.gold_quadrant);
    out += ',';
    out += to_string(r.gold_status);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predictions

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(path, "missing required field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& path, bool non_empty) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) schema_fail(path + "." + key, "expected a string");
  auto s = v.get<std::string>();
  if (non_empty && s.empty()) schema_fail(path + "." + key, "must not be empty");
  return s;
}

std::vector<double> read_probs(const json& arr, const std::string& path, std::size_t expected) {
  if (!arr.is_array()) schema_fail(path, "expected an array of numbers");
  if (arr.size() != expected) {
    schema_fail(path, "has " + std::to_string(arr.size()) + " entries but there are " + std::to_string(expected) +
                          " labels");
  }
  std::vector<double> probs;
  probs.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) schema_fail(path + "[" + std::to_string(i) + "]", "expected a number");
    probs.push_back(arr[i].get<double>());
  }
  return probs;
}

ClassDistribution make_distribution(const LabelSet& labels, std::vector<double> probs, const std::string& path) {
  try {
    return ClassDistribution(labels, std::move(probs));
  } catch (const DistributionInvalid& e) {
    throw DistributionInvalid(path + ": " + e.what());
  }
}

std::size_t read_index(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    schema_fail(path + "." + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

void warn_unknown_keys(const json& obj, std::initializer_list<std::string_view> known, const std::string& path,
                       std::vector<std::string>& warnings) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      warnings.push_back(path + "." + key + ": unknown field ignored");
    }
  }
}

bool close(const ClassDistribution& a, const ClassDistribution& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.prob(i) - b.prob(i)) > tol) return false;
  }
  return true;
}

ChunkDetail read_chunks(const json& arr, const LabelSet& labels, const std::string& path) {
  if (!arr.is_array()) schema_fail(path, "expected an array");
  if (arr.empty()) schema_fail(path, "must contain at least one chunk");
  ChunkDetail detail;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string cp = path + "[" + std::to_string(i) + "]";
    const auto& c = arr[i];
    if (!c.is_object()) schema_fail(cp, "expected an object");
    const auto start = read_index(c, "start", cp);
    const auto end = read_index(c, "end", cp);
    if (end <= start) schema_fail(cp + ".end", "must be greater than start");
    auto probs = read_probs(require(c, "probs", cp), cp + ".probs", labels.size());
    detail.plan.chunks.push_back({start, end});
    detail.chunk_dists.push_back(make_distribution(labels, std::move(probs), cp + ".probs"));
  }

  auto& chunks = detail.plan.chunks;
  if (chunks.front().start != 0) schema_fail(path + "[0].start", "first chunk must start at 0");
  std::size_t max_len = 0;
  for (const auto& c : chunks) max_len = std::max(max_len, c.size());
  std::size_t overlap = 0;
  for (std::size_t i = 1; i < chunks.size(); ++i) {
    const std::string cp = path + "[" + std::to_string(i) + "].start";
    if (chunks[i].start > chunks[i - 1].end) schema_fail(cp, "leaves a gap after the previous chunk");
    if (chunks[i].end <= chunks[i - 1].end) schema_fail(cp, "chunk does not advance past the previous one");
    const std::size_t ov = chunks[i - 1].end - chunks[i].start;
    if (i == 1) overlap = ov;
    else if (ov != overlap) schema_fail(cp, "inconsistent chunk overlap");
  }
  if (overlap >= max_len) schema_fail(path, "chunk overlap is not smaller than the chunk size");
  detail.plan.max_tokens = max_len;
  detail.plan.overlap = overlap;
  return detail;
}

PredictionRecord read_record(const json& rec, const std::string& path, std::vector<std::string>& warnings) {
  if (!rec.is_object()) schema_fail(path, "expected an object");
  warn_unknown_keys(rec, {"song_id", "modality", "model_id", "labels", "probs", "chunks", "tokenizer_id"}, path,
                    warnings);

  const std::string song_id = require_string(rec, "song_id", path, true);
  const std::string modality = require_string(rec, "modality", path, false);
  PredictionModality mod;
  if (modality == "audio") mod = PredictionModality::Audio;
  else if (modality == "text") mod = PredictionModality::Text;
  else schema_fail(path + ".modality", "expected \"audio\" or \"text\", found \"" + modality + "\"");
  const std::string model_id = require_string(rec, "model_id", path, true);

  const auto& labels_json = require(rec, "labels", path);
  if (!labels_json.is_array() || labels_json.empty()) schema_fail(path + ".labels", "expected a non-empty array");
  LabelSet labels;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < labels_json.size(); ++i) {
    const std::string lp = path + ".labels[" + std::to_string(i) + "]";
    if (!labels_json[i].is_string() || labels_json[i].get<std::string>().empty()) {
      schema_fail(lp, "expected a non-empty string");
    }
    auto l = labels_json[i].get<std::string>();
    if (!seen.insert(l).second) schema_fail(lp, "duplicate label \"" + l + "\"");
    labels.push_back(std::move(l));
  }

  auto probs = read_probs(require(rec, "probs", path), path + ".probs", labels.size());
  PredictionRecord out{song_id, mod, model_id, make_distribution(labels, std::move(probs), path + ".probs"),
                       std::nullopt, std::nullopt};

  if (auto it = rec.find("tokenizer_id"); it != rec.end()) {
    if (!it->is_string()) schema_fail(path + ".tokenizer_id", "expected a string");
    out.tokenizer_id = it->get<std::string>();
  }
  if (auto it = rec.find("chunks"); it != rec.end()) {
    if (mod != PredictionModality::Text) schema_fail(path + ".chunks", "chunk detail is only allowed on text records");
    out.chunk_detail = read_chunks(*it, labels, path + ".chunks");

    const auto& d = *out.chunk_detail;
    std::vector<std::size_t> lengths;
    for (const auto& c : d.plan.chunks) lengths.push_back(c.size());
    bool reproduced = false;
    for (auto w : {ChunkWeighting::Uniform, ChunkWeighting::TokenCount, ChunkWeighting::MajorityVote}) {
      if (close(aggregate_chunks(d.chunk_dists, w, lengths), out.distribution, 1e-9)) {
        reproduced = true;
        break;
      }
    }
    if (!reproduced) {
      warnings.push_back(path + ".probs: no chunk aggregation rule reproduces the recorded distribution");
    }
  }
  return out;
}

}  // namespace

LoadedPredictions parse_predictions(std::string_view json_text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$: " + std::string(source) + " is not valid JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) schema_fail("$", "expected a JSON object at the top level");

  LoadedPredictions out;
  warn_unknown_keys(doc, {"schema_version", "records"}, "$", out.warnings);
  const auto& version = require(doc, "schema_version", "$");
  if (!version.is_string()) schema_fail("$.schema_version", "expected a string");
  if (version.get<std::string>() != kPredictionsSchemaVersion) {
    schema_fail("$.schema_version", "unsupported version \"" + version.get<std::string>() + "\"");
  }
  const auto& records = require(doc, "records", "$");
  if (!records.is_array()) schema_fail("$.records", "expected an array");

  std::set<std::tuple<std::string, PredictionModality, std::string>> keys;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string path = "$.records[" + std::to_string(i) + "]";
    auto rec = read_record(records[i], path, out.warnings);
    if (!keys.emplace(rec.song_id, rec.modality, rec.model_id).second) {
      schema_fail(path, "duplicate record for song \"" + rec.song_id + "\", modality " +
                            std::string(to_string(rec.modality)) + ", model \"" + rec.model_id + "\"");
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

LoadedPredictions load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_predictions(buf.str(), path.string());
}

std::string serialize_predictions(const std::vector<PredictionRecord>& records) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kPredictionsSchemaVersion;
  doc["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["song_id"] = r.song_id;
    j["modality"] = to_string(r.modality);
    j["model_id"] = r.model_id;
    j["labels"] = r.distribution.labels();
    j["probs"] = r.distribution.probs();
    if (r.chunk_detail) {
      auto chunks = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < r.chunk_detail->plan.chunks.size(); ++i) {
        const auto& c = r.chunk_detail->plan.chunks[i];
        nlohmann::ordered_json cj;
        cj["start"] = c.start;
        cj["end"] = c.end;
        cj["probs"] = r.chunk_detail->chunk_dists[i].probs();
        chunks.push_back(std::move(cj));
      }
      j["chunks"] = std::move(chunks);
    }
    if (r.tokenizer_id) j["tokenizer_id"] = *r.tokenizer_id;
    doc["records"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Joining

namespace {

// Both sides over one label set in one order, or nullopt if irreconcilable.
std::optional<std::pair<ClassDistribution, ClassDistribution>> reconcile(const ClassDistribution& audio,
                                                                         const ClassDistribution& text,
                                                                         std::optional<LabelSpace> space,
                                                                         bool& marginalized) {
  marginalized = false;
  try {
    if (space) {
      marginalized = audio.labels().size() != labels_for(*space).size() ||
                     text.labels().size() != labels_for(*space).size();
      return std::pair{to_label_space(audio, *space), to_label_space(text, *space)};
    }
    const auto sa = detect_label_space(audio.labels());
    const auto st = detect_label_space(text.labels());
    if (sa && st) {
      if (*sa == *st) return std::pair{to_label_space(audio, *sa), to_label_space(text, *sa)};
      if (*sa == LabelSpace::Quadrants) {
        marginalized = true;
        return std::pair{to_label_space(audio, *st), to_label_space(text, *st)};
      }
      if (*st == LabelSpace::Quadrants) {
        marginalized = true;
        return std::pair{to_label_space(audio, *sa), to_label_space(text, *sa)};
      }
      return std::nullopt;
    }
    if (audio.same_label_set(text)) return std::pair{audio, text.reordered(audio.labels())};
  } catch (const WrongLabelSet&) {
  }
  return std::nullopt;
}

}  // namespace

JoinResult join_modalities(const std::vector<SongRecord>& songs, const std::vector<PredictionRecord>& predictions,
                           std::optional<LabelSpace> space) {
  JoinResult result;
  std::map<std::string, const SongRecord*> by_id;
  for (const auto& s : songs) by_id.emplace(s.song_id, &s);

  std::map<std::string, const PredictionRecord*> audio;
  std::map<std::string, const PredictionRecord*> text;
  std::set<std::string> unknown;
  for (const auto& p : predictions) {
    if (!by_id.contains(p.song_id)) {
      unknown.insert(p.song_id);
      continue;
    }
    auto& side = p.modality == PredictionModality::Audio ? audio : text;
    if (!side.emplace(p.song_id, &p).second) {
      result.report.duplicate.push_back(p.song_id + "/" + std::string(to_string(p.modality)));
    }
  }
  result.report.unknown_song.assign(unknown.begin(), unknown.end());

  for (const auto& song : songs) {
    const auto a = audio.find(song.song_id);
    const auto t = text.find(song.song_id);
    if (a == audio.end() && t == text.end()) continue;
    if (t == text.end()) {
      result.report.audio_only.push_back(song.song_id);
      continue;
    }
    if (a == audio.end()) {
      result.report.text_only.push_back(song.song_id);
      continue;
    }
    bool marginalized = false;
    auto both = reconcile(a->second->distribution, t->second->distribution, space, marginalized);
    if (!both) {
      result.report.incompatible_labels.push_back(song.song_id);
      continue;
    }
    PairedPrediction pair{song.song_id, std::move(both->first), std::move(both->second), std::nullopt};
    if (song.evaluable()) {
      if (auto s = detect_label_space(pair.audio.labels())) pair.gold = label_in_space(*song.gold_quadrant, *s);
    }
    if (marginalized) ++result.report.marginalized;
    if (pair.gold) ++result.report.paired_with_gold;
    result.pairs.push_back(std::move(pair));
  }
  result.report.paired = result.pairs.size();
  return result;
}

EvaluationSet collect_evaluation(const std::vector<SongRecord>& songs,
                                 const std::vector<PredictionRecord>& predictions, PredictionModality modality,
                                 LabelSpace space) {
  EvaluationSet set;
  set.labels = labels_for(space);
  std::map<std::string, const PredictionRecord*> by_song;
  for (const auto& p : predictions) {
    if (p.modality == modality) by_song.emplace(p.song_id, &p);
  }
  for (const auto& song : songs) {
    auto it = by_song.find(song.song_id);
    if (it == by_song.end()) {
      ++set.skipped_no_prediction;
      continue;
    }
    if (!song.evaluable()) {
      ++set.skipped_no_gold;
      continue;
    }
    try {
      const auto d = to_label_space(it->second->distribution, space);
      set.song_ids.push_back(song.song_id);
      set.golds.push_back(label_in_space(*song.gold_quadrant, space));
      set.preds.push_back(d.argmax_label());
    } catch (const WrongLabelSet&) {
      ++set.skipped_label_space;
    }
  }
  return set;
}

}  // namespace musent
