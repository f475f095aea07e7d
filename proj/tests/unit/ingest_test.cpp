#include <gtest/gtest.h>

#include <random>

#include "musent/delimited.hpp"
#include "musent/errors.hpp"
#include "musent/ingest.hpp"
#include "test_support.hpp"

using namespace musent;
using musent::testkit::TempDir;
using musent::testkit::write_text;

namespace {

const LabelSet kV{"positive", "negative"};

std::string one_record(const std::string& body) {
  return R"({"schema_version": "1", "records": [)" + body + "]}";
}

template <typename E>
std::string error_of(const std::string& text) {
  try {
    parse_predictions(text);
  } catch (const E& e) {
    return e.what();
  }
  return "<no error>";
}

PredictionRecord text_pred(std::string id, double pos) {
  return {std::move(id), PredictionModality::Text, "t", ClassDistribution(kV, {pos, 1 - pos}), {}, {}};
}

PredictionRecord audio_pred(std::string id, std::vector<double> q) {
  return {std::move(id), PredictionModality::Audio, "a", ClassDistribution(quadrant_labels(), std::move(q)), {}, {}};
}

SongRecord song(std::string id, std::optional<Quadrant> q) {
  SongRecord r;
  r.song_id = std::move(id);
  r.gold_quadrant = q;
  r.gold_status = q ? GoldStatus::Ok : GoldStatus::None;
  return r;
}

}  // namespace

TEST(Manifest, LoadsColumns) {
  TempDir dir("man");
  write_text(dir / "m.csv",
             "song_id,title,artist,valence,arousal,quadrant,mood_terms,audio_path,lyrics_path,genre,year\n"
             "a,\"Song, One\",X,0.5,-0.5,,happy; calm,a.mp3,,pop,2001\n"
             "b,Two,Y,,,Q2,,,b.txt,,\n");
  const auto recs = load_manifest(dir / "m.csv");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].title, "Song, One");
  EXPECT_EQ(recs[0].gold_va, VAPoint(0.5, -0.5));
  EXPECT_EQ(recs[0].mood_terms, (std::vector<std::string>{"happy", "calm"}));
  EXPECT_TRUE(recs[0].has_audio);
  EXPECT_FALSE(recs[0].has_lyrics);
  EXPECT_FALSE(recs[0].evaluable());
  EXPECT_EQ(recs[1].gold_quadrant, Quadrant::Q2);
  EXPECT_TRUE(recs[1].evaluable());
  EXPECT_TRUE(recs[1].has_lyrics);
}

TEST(Manifest, Errors) {
  TempDir dir("man");
  write_text(dir / "a.csv", "id,title\n1,x\n");
  EXPECT_THROW(load_manifest(dir / "a.csv"), ParseError);
  write_text(dir / "b.csv", "song_id\n1\n1\n");
  EXPECT_THROW(load_manifest(dir / "b.csv"), DuplicateSongId);
  write_text(dir / "c.csv", "song_id,quadrant\n1,Q7\n");
  EXPECT_THROW(load_manifest(dir / "c.csv"), ParseError);
  write_text(dir / "d.csv", "song_id,valence,arousal\n1,0.5,\n");
  EXPECT_THROW(load_manifest(dir / "d.csv"), ParseError);
  write_text(dir / "e.csv", "song_id,valence\n1,0.5\n");
  EXPECT_THROW(load_manifest(dir / "e.csv"), ParseError);
}

TEST(Manifest, QuadrantRemap) {
  TempDir dir("man");
  write_text(dir / "m.tsv", "song_id\tquadrant\n1\t2\n2\t4\n");
  ManifestOptions o;
  o.quadrant_remap = {{"1", Quadrant::Q1}, {"2", Quadrant::Q2}, {"3", Quadrant::Q3}, {"4", Quadrant::Q4}};
  const auto recs = load_manifest(dir / "m.tsv", o);
  EXPECT_EQ(recs[0].gold_quadrant, Quadrant::Q2);
  EXPECT_EQ(recs[1].gold_quadrant, Quadrant::Q4);
}

TEST(NormalizeVA, MidlinesFlagged) {
  std::vector<SongRecord> recs(3);
  recs[0].song_id = "a";
  recs[0].gold_va = VAPoint(0.4, 0.2);
  recs[1].song_id = "b";
  recs[1].gold_va = VAPoint(0.0, 0.2);
  recs[2].song_id = "c";
  const auto r = normalize_va_annotations(recs, 0.0);
  EXPECT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[0].gold_quadrant, Quadrant::Q1);
  EXPECT_EQ(r.records[1].gold_status, GoldStatus::Ambiguous);
  EXPECT_FALSE(r.records[1].gold_quadrant.has_value());
  EXPECT_EQ(r.records[1].gold_va, VAPoint(0.0, 0.2));
  EXPECT_EQ(r.records[2].gold_status, GoldStatus::None);
  EXPECT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.count(GoldStatus::Ok), 1u);
}

TEST(NormalizeCategorical, Votes) {
  const MappingTable table({{"happy", Quadrant::Q1, Provenance::LexiconDerived},
                            {"fun", Quadrant::Q1, Provenance::LexiconDerived},
                            {"sad", Quadrant::Q3, Provenance::LexiconDerived},
                            {"love", Excluded{}, Provenance::ManualExclusion},
                            {"odd", Unmapped{}, Provenance::LexiconDerived}});
  auto mk = [](std::string id, std::vector<std::string> terms) {
    SongRecord r;
    r.song_id = std::move(id);
    r.mood_terms = std::move(terms);
    return r;
  };
  const auto r = normalize_categorical_annotations(
      {mk("a", {"happy", "fun", "sad"}), mk("b", {"happy", "sad"}), mk("c", {"love"}), mk("d", {"odd", "zzz"}),
       mk("e", {"love", "sad"}), mk("f", {})},
      table);
  EXPECT_EQ(r.records[0].gold_quadrant, Quadrant::Q1);
  EXPECT_EQ(r.records[1].gold_status, GoldStatus::Tied);
  EXPECT_EQ(r.records[2].gold_status, GoldStatus::Excluded);
  EXPECT_EQ(r.records[3].gold_status, GoldStatus::Unmapped);
  EXPECT_EQ(r.records[4].gold_quadrant, Quadrant::Q3);
  EXPECT_EQ(r.records[5].gold_status, GoldStatus::None);
}

TEST(FormatManifest, ReloadsToSameRecords) {
  TempDir dir("man");
  write_text(dir / "m.csv", "song_id,title,valence,arousal,mood_terms\na,\"x, y\",0.1,-0.3,calm;sad\nb,z,,,\n");
  const auto recs = load_manifest(dir / "m.csv", {.delimiter = {}, .quadrant_remap = {}, .va_midpoint = 0.0});
  write_text(dir / "n.csv", format_manifest(recs));
  const auto again = load_manifest(dir / "n.csv");
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again[0].title, recs[0].title);
  EXPECT_EQ(again[0].gold_va, recs[0].gold_va);
  EXPECT_EQ(again[0].gold_quadrant, Quadrant::Q4);
  EXPECT_EQ(again[0].mood_terms, recs[0].mood_terms);
}

TEST(Predictions, ParsesAndWarnsOnUnknownFields) {
  const auto r = parse_predictions(one_record(
      R"({"song_id": "a", "modality": "audio", "model_id": "m", "labels": ["Q1","Q2","Q3","Q4"],
          "probs": [0.1, 0.2, 0.3, 0.4], "extra": 1})"));
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].distribution.prob("Q4"), 0.4);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].rfind("$.records[0].extra", 0), 0u);
}

TEST(Predictions, SumOffIsDistributionInvalid) {
  const auto msg = error_of<DistributionInvalid>(
      testkit::read_text(testkit::fixture_dir() / "sum_point_eight.json"));
  EXPECT_EQ(msg.rfind("$.records[0].probs:", 0), 0u) << msg;
}

TEST(Predictions, DuplicateTripleIsSchemaError) {
  const std::string rec = R"({"song_id": "a", "modality": "text", "model_id": "m", "labels": ["positive","negative"], "probs": [0.5,0.5]})";
  const auto msg = error_of<SchemaError>(one_record(rec + "," + rec));
  EXPECT_EQ(msg.rfind("$.records[1]:", 0), 0u) << msg;
}

TEST(Predictions, MalformedSuite) {
  const auto dir = testkit::fixture_dir() / "malformed";
  const auto table = parse_delimited(testkit::read_text(dir / "expected.tsv"), '\t');
  ASSERT_GE(table.rows.size(), 10u);
  for (const auto& row : table.rows) {
    const auto text = testkit::read_text(dir / row.cells[0]);
    const auto msg = error_of<SchemaError>(text);
    EXPECT_EQ(msg.rfind(row.cells[2] + ":", 0), 0u) << row.cells[0] << ": " << msg;
  }
}

TEST(Predictions, ChunkDetail) {
  const auto r = parse_predictions(one_record(
      R"({"song_id": "a", "modality": "text", "model_id": "m", "labels": ["positive","negative"],
          "probs": [0.75, 0.25], "tokenizer_id": "whitespace",
          "chunks": [{"start": 0, "end": 300, "probs": [1, 0]}, {"start": 300, "end": 400, "probs": [0, 1]}]})"));
  ASSERT_TRUE(r.records[0].chunk_detail.has_value());
  EXPECT_EQ(r.records[0].chunk_detail->plan.max_tokens, 300u);
  EXPECT_TRUE(r.warnings.empty());

  const auto bad = parse_predictions(one_record(
      R"({"song_id": "a", "modality": "text", "model_id": "m", "labels": ["positive","negative"],
          "probs": [0.9, 0.1], "chunks": [{"start": 0, "end": 3, "probs": [0.5, 0.5]}]})"));
  ASSERT_EQ(bad.warnings.size(), 1u);
  EXPECT_EQ(bad.warnings[0].rfind("$.records[0].probs", 0), 0u);
}

TEST(Predictions, ChunkGapIsSchemaError) {
  const auto msg = error_of<SchemaError>(one_record(
      R"({"song_id": "a", "modality": "text", "model_id": "m", "labels": ["positive","negative"],
          "probs": [0.5, 0.5], "chunks": [{"start": 0, "end": 3, "probs": [0.5, 0.5]},
                                          {"start": 5, "end": 8, "probs": [0.5, 0.5]}]})"));
  EXPECT_EQ(msg.rfind("$.records[0].chunks[1].start:", 0), 0u) << msg;
}

TEST(Predictions, RoundTripIsStable) {
  std::mt19937_64 rng(61);
  std::vector<PredictionRecord> recs;
  for (int i = 0; i < 50; ++i) {
    PredictionRecord r{"s" + std::to_string(i), PredictionModality::Audio, "audio-model",
                       testkit::random_distribution(rng, quadrant_labels()), {}, {}};
    recs.push_back(r);
    ChunkDetail detail;
    detail.plan = plan_chunks(40 + static_cast<std::size_t>(i) * 13, 16, 0);
    for (std::size_t c = 0; c < detail.plan.chunks.size(); ++c) {
      detail.chunk_dists.push_back(testkit::random_distribution(rng, kV));
    }
    auto agg = aggregate_chunks(detail.chunk_dists);
    recs.push_back({r.song_id, PredictionModality::Text, "text-model", agg, detail, std::string("whitespace")});
  }
  const auto once = serialize_predictions(recs);
  const auto loaded = parse_predictions(once);
  EXPECT_TRUE(loaded.warnings.empty());
  EXPECT_EQ(loaded.records, recs);
  EXPECT_EQ(serialize_predictions(loaded.records), once);
}

TEST(Predictions, LoadMissingFile) { EXPECT_THROW(load_predictions("/nonexistent/p.json"), IoError); }

TEST(Join, MarginalizesQuadrantsAgainstBinary) {
  const std::vector<SongRecord> songs{song("a", Quadrant::Q2), song("b", Quadrant::Q1), song("c", std::nullopt),
                                      song("d", Quadrant::Q3)};
  const std::vector<PredictionRecord> preds{audio_pred("a", {0.1, 0.2, 0.3, 0.4}), text_pred("a", 0.3),
                                            audio_pred("b", {0.7, 0.1, 0.1, 0.1}), text_pred("b", 0.8),
                                            text_pred("c", 0.4),  audio_pred("d", {0.25, 0.25, 0.25, 0.25}),
                                            text_pred("zzz", 0.5)};
  const auto j = join_modalities(songs, preds);
  ASSERT_EQ(j.pairs.size(), 2u);
  EXPECT_EQ(j.pairs[0].song_id, "a");
  EXPECT_EQ(j.pairs[0].audio.labels(), kV);
  EXPECT_NEAR(j.pairs[0].audio.prob("positive"), 0.5, 1e-12);
  EXPECT_EQ(j.pairs[0].gold, "negative");
  EXPECT_EQ(j.report.marginalized, 2u);
  EXPECT_EQ(j.report.text_only, (std::vector<std::string>{"c"}));
  EXPECT_EQ(j.report.audio_only, (std::vector<std::string>{"d"}));
  EXPECT_EQ(j.report.unknown_song, (std::vector<std::string>{"zzz"}));
  EXPECT_EQ(j.report.paired_with_gold, 2u);
}

TEST(Join, ExplicitSpaceAndIncompatible) {
  const std::vector<SongRecord> songs{song("a", Quadrant::Q2), song("b", Quadrant::Q4)};
  const std::vector<PredictionRecord> preds{
      audio_pred("a", {0.1, 0.2, 0.3, 0.4}), audio_pred("b", {0.1, 0.2, 0.3, 0.4}), text_pred("a", 0.3),
      {"b", PredictionModality::Text, "t", ClassDistribution({"high", "low"}, {0.5, 0.5}), {}, {}}};
  const auto j = join_modalities(songs, preds, LabelSpace::Valence);
  ASSERT_EQ(j.pairs.size(), 1u);
  EXPECT_EQ(j.report.incompatible_labels, (std::vector<std::string>{"b"}));

  const auto q = join_modalities(songs, {audio_pred("a", {0.1, 0.2, 0.3, 0.4}), audio_pred("a", {0.4, 0.3, 0.2, 0.1}),
                                         audio_pred("b", {0.1, 0.2, 0.3, 0.4}),
                                         {"b", PredictionModality::Text, "t",
                                          ClassDistribution({"Q4", "Q3", "Q2", "Q1"}, {0.1, 0.2, 0.3, 0.4}), {}, {}}});
  ASSERT_EQ(q.pairs.size(), 1u);
  EXPECT_EQ(q.pairs[0].text.labels(), quadrant_labels());
  EXPECT_EQ(q.pairs[0].text.prob("Q1"), 0.4);
  EXPECT_EQ(q.pairs[0].gold, "Q4");
  EXPECT_EQ(q.report.duplicate, (std::vector<std::string>{"a/audio"}));
  EXPECT_EQ(q.report.audio_only, (std::vector<std::string>{"a"}));
}

TEST(CollectEvaluation, SkipsAndProjects) {
  const std::vector<SongRecord> songs{song("a", Quadrant::Q2), song("b", std::nullopt), song("c", Quadrant::Q4),
                                      song("d", Quadrant::Q1)};
  const std::vector<PredictionRecord> preds{audio_pred("a", {0.1, 0.2, 0.3, 0.4}), audio_pred("b", {0.1, 0.2, 0.3, 0.4}),
                                            audio_pred("c", {0.4, 0.3, 0.2, 0.1}), text_pred("a", 0.9)};
  const auto s = collect_evaluation(songs, preds, PredictionModality::Audio, LabelSpace::Arousal);
  EXPECT_EQ(s.golds, (std::vector<Label>{"high", "low"}));
  EXPECT_EQ(s.preds, (std::vector<Label>{"low", "high"}));
  EXPECT_EQ(s.skipped_no_gold, 1u);
  EXPECT_EQ(s.skipped_no_prediction, 1u);
  const auto t = collect_evaluation(songs, preds, PredictionModality::Text, LabelSpace::Quadrants);
  EXPECT_EQ(t.skipped_label_space, 1u);
  EXPECT_TRUE(t.golds.empty());
}
