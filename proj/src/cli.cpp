#include "musent/cli.hpp"

#include <ostream>

#include <CLI11.hpp>

#include "musent/delimited.hpp"
#include "musent/errors.hpp"
#include "musent/report.hpp"

namespace musent::cli {

namespace {

std::vector<SongRecord> load_gold(const GoldOptions& g, std::ostream& err) {
  ManifestOptions mo;
  mo.quadrant_remap = g.quadrant_remap;
  auto records = load_manifest(g.manifest, mo);

  auto report = [&](const NormalizationResult& r) {
    for (const auto& d : r.diagnostics) err << "warning: " << d.song_id << ": " << d.message << "\n";
  };
  if (g.mapping) {
    auto r = normalize_categorical_annotations(std::move(records), load_mapping_table(*g.mapping));
    report(r);
    records = std::move(r.records);
  }
  if (g.midpoint) {
    auto r = normalize_va_annotations(std::move(records), *g.midpoint);
    report(r);
    records = std::move(r.records);
  } else {
    const auto unresolved = std::count_if(records.begin(), records.end(), [](const SongRecord& s) {
      return s.gold_va.has_value() && !s.gold_quadrant.has_value();
    });
    if (unresolved > 0) {
      err << "warning: " << unresolved
          << " record(s) carry valence/arousal values but no --midpoint was given; they have no gold label\n";
    }
  }
  return records;
}

std::vector<PredictionRecord> load_prediction_files(const std::vector<std::filesystem::path>& paths,
                                                    std::ostream& err) {
  std::vector<PredictionRecord> all;
  std::vector<std::filesystem::path> seen;
  for (const auto& p : paths) {
    if (std::find(seen.begin(), seen.end(), p) != seen.end()) continue;
    seen.push_back(p);
    auto loaded = load_predictions(p);
    for (const auto& w : loaded.warnings) err << "warning: " << p.string() << ": " << w << "\n";
    for (auto& r : loaded.records) all.push_back(std::move(r));
  }
  return all;
}

void report_join(const JoinReport& r, std::ostream& err) {
  err << "info: joined " << r.paired << " song(s) with both modalities (" << r.paired_with_gold
      << " with gold labels); audio only " << r.audio_only.size() << ", text only " << r.text_only.size() << "\n";
  if (!r.unknown_song.empty()) {
    err << "warning: " << r.unknown_song.size() << " prediction song id(s) are not in the manifest\n";
  }
  for (const auto& d : r.duplicate) err << "warning: duplicate prediction " << d << " ignored\n";
  for (const auto& s : r.incompatible_labels) err << "warning: " << s << ": label sets cannot be reconciled\n";
}

JoinResult join_for(const GoldOptions& gold, const std::filesystem::path& audio, const std::filesystem::path& text,
                    std::optional<LabelSpace> space, std::ostream& err) {
  const auto songs = load_gold(gold, err);
  // Each flag contributes its own modality; one file may serve both.
  std::vector<PredictionRecord> filtered;
  for (auto& p : load_prediction_files({audio}, err)) {
    if (audio == text || p.modality == PredictionModality::Audio) filtered.push_back(std::move(p));
  }
  if (!(audio == text)) {
    for (auto& p : load_prediction_files({text}, err)) {
      if (p.modality == PredictionModality::Text) filtered.push_back(std::move(p));
    }
  }
  auto joined = join_modalities(songs, filtered, space);
  report_join(joined.report, err);
  return joined;
}

std::string space_suffix(std::optional<LabelSpace> space) {
  return space ? std::string(to_string(*space)) : std::string("auto");
}

std::map<std::string, Quadrant> parse_remap(const std::string& spec) {
  std::map<std::string, Quadrant> out;
  for (const auto& item : split(spec, ',')) {
    const auto t = trim(item);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--quadrant-map entries look like value=Q1, got '" + t + "'");
    auto q = parse_quadrant(trim(t.substr(eq + 1)));
    if (!q) throw InvalidArgument("--quadrant-map: unknown quadrant in '" + t + "'");
    out[trim(t.substr(0, eq))] = *q;
  }
  return out;
}

}  // namespace

MappingResult cmd_map_tags(const MapTagsOptions& o, std::ostream& err) {
  const auto lex = load_lexicon(o.lexicon, o.schema);
  const MappingTable overrides = o.overrides ? load_mapping_table(*o.overrides) : MappingTable{};

  MappingResult result;
  if (o.mirex_clusters) {
    result = map_mirex_cluster_terms(load_mood_clusters(*o.mirex_clusters), lex, overrides, o.cluster_mapping);
  } else if (o.vocabulary) {
    result = build_mapping_table(load_vocabulary(*o.vocabulary), lex, overrides);
  } else if (o.overrides) {
    std::vector<std::string> vocab;
    for (const auto& rule : overrides.rules()) vocab.push_back(rule.term);
    result = build_mapping_table(vocab, lex, overrides);
  } else {
    throw InvalidArgument("map-tags needs --vocabulary, --mirex-clusters or --overrides");
  }
  for (const auto& d : result.diagnostics) err << "warning: " << d.term << ": " << d.message << "\n";
  write_file(o.out_dir / "mapping.tsv", format_mapping_table(result.table));
  err << "info: mapped " << result.table.size() << " term(s), " << result.unmapped_terms().size()
      << " unmapped\n";
  return result;
}

NormalizationResult cmd_normalize(const NormalizeOptions& o, std::ostream& err) {
  NormalizationResult result;
  result.records = load_gold(o.gold, err);
  write_file(o.out_dir / "manifest_normalized.csv", format_manifest(result.records));

  OrderedJson doc;
  OrderedJson counts = OrderedJson::object();
  for (auto s : {GoldStatus::Ok, GoldStatus::None, GoldStatus::Ambiguous, GoldStatus::Excluded, GoldStatus::Unmapped,
                 GoldStatus::Tied}) {
    counts[std::string(to_string(s))] = result.count(s);
  }
  doc["records"] = result.records.size();
  doc["gold_status"] = std::move(counts);
  OrderedJson quadrants = OrderedJson::object();
  for (Quadrant q : kAllQuadrants) {
    quadrants[std::string(to_string(q))] = std::count_if(result.records.begin(), result.records.end(),
                                                         [q](const SongRecord& r) { return r.evaluable() && *r.gold_quadrant == q; });
  }
  doc["quadrants"] = std::move(quadrants);
  write_json(o.out_dir / "normalize_report.json", doc);
  return result;
}

std::map<PredictionModality, MetricsReport> cmd_evaluate(const EvaluateOptions& o, std::ostream& err) {
  if (!o.audio_preds && !o.text_preds) throw InvalidArgument("evaluate needs --audio-preds and/or --text-preds");
  const auto songs = load_gold(o.gold, err);
  std::map<PredictionModality, MetricsReport> reports;
  const std::vector<std::pair<PredictionModality, std::optional<std::filesystem::path>>> inputs = {
      {PredictionModality::Audio, o.audio_preds}, {PredictionModality::Text, o.text_preds}};
  for (const auto& [modality, path] : inputs) {
    if (!path) continue;
    const auto preds = load_prediction_files({*path}, err);
    const auto set = collect_evaluation(songs, preds, modality, o.space);
    if (set.skipped_label_space > 0) {
      err << "warning: " << set.skipped_label_space << " " << to_string(modality)
          << " prediction(s) cannot be expressed in the " << to_string(o.space) << " label space\n";
    }
    if (set.golds.empty()) {
      err << "warning: no evaluable " << to_string(modality) << " records in the " << to_string(o.space)
          << " label space\n";
      continue;
    }
    const auto cm = confusion(set.golds, set.preds, set.labels);
    auto report = metrics(cm, o.zero_division);
    auto doc = OrderedJson::object();
    doc["modality"] = to_string(modality);
    doc["label_space"] = to_string(o.space);
    doc.update(metrics_to_json(report, cm));
    const std::string stem = "metrics_" + std::string(to_string(modality)) + "_" + std::string(to_string(o.space));
    write_json(o.out_dir / (stem + ".json"), doc);
    write_file(o.out_dir / (stem + ".svg"),
               render_metrics_svg(report, std::string(to_string(modality)) + " model, " +
                                              std::string(to_string(o.space))));
    err << "info: " << to_string(modality) << " " << to_string(o.space) << ": " << set.golds.size()
        << " record(s), macro F1 " << report.macro.f1 << "\n";
    reports.emplace(modality, std::move(report));
  }
  if (reports.empty()) {
    throw EmptyDataset("no evaluable records (need a gold label and a prediction in the " +
                       std::string(to_string(o.space)) + " label space)");
  }
  return reports;
}

FusionRun cmd_fuse(const FuseOptions& o, std::ostream& err) {
  const auto joined = join_for(o.gold, o.audio_preds, o.text_preds, o.space, err);
  if (joined.pairs.empty()) throw EmptyDataset("no songs have both audio and text predictions");
  write_json(o.out_dir / "join_report.json", join_report_to_json(joined.report));

  auto run = fuse_all(joined.pairs, o.config, o.zero_division);

  OrderedJson doc;
  doc["strategy"] = to_string(o.config.strategy());
  doc["audio_weight"] = o.config.audio_weight() ? OrderedJson(*o.config.audio_weight()) : OrderedJson(nullptr);
  doc["tie_break"] = to_string(o.config.tie_break());
  doc["label_space"] = space_suffix(o.space);
  auto recs = OrderedJson::array();
  for (std::size_t i = 0; i < joined.pairs.size(); ++i) {
    const auto& pair = joined.pairs[i];
    const auto& out = run.outcomes[i];
    OrderedJson r;
    r["song_id"] = pair.song_id;
    r["label"] = out.label;
    r["chosen_modality"] = to_string(out.chosen);
    r["labels"] = pair.audio.labels();
    r["fused_probs"] = out.fused ? OrderedJson(out.fused->probs()) : OrderedJson(nullptr);
    r["gold"] = pair.gold ? OrderedJson(*pair.gold) : OrderedJson(nullptr);
    recs.push_back(std::move(r));
  }
  doc["records"] = std::move(recs);
  write_json(o.out_dir / "fused.json", doc);

  if (run.report) {
    std::vector<Label> golds;
    std::vector<Label> preds;
    for (std::size_t i = 0; i < joined.pairs.size(); ++i) {
      if (!joined.pairs[i].gold) continue;
      golds.push_back(*joined.pairs[i].gold);
      preds.push_back(run.outcomes[i].label);
    }
    const auto cm = confusion(golds, preds, joined.pairs.front().audio.labels());
    auto mdoc = OrderedJson::object();
    mdoc["strategy"] = to_string(o.config.strategy());
    mdoc.update(metrics_to_json(*run.report, cm));
    write_json(o.out_dir / "metrics_fused.json", mdoc);
    write_file(o.out_dir / "metrics_fused.svg",
               render_metrics_svg(*run.report, "fusion: " + std::string(to_string(o.config.strategy()))));
    err << "info: fused macro F1 " << run.report->macro.f1 << " over " << golds.size() << " record(s)\n";
  } else {
    err << "warning: no paired record has a gold label; metrics skipped\n";
  }

  if (o.config.strategy() == FusionStrategy::MaxProbability) {
    const auto sel = selection_proportions(joined.pairs, o.config.tie_break());
    OrderedJson s;
    s["records"] = joined.pairs.size();
    s["audio_count"] = sel.audio_count;
    s["text_count"] = sel.text_count;
    s["audio_fraction"] = sel.audio;
    s["text_fraction"] = sel.text;
    write_json(o.out_dir / "selection.json", s);
    err << "info: audio chosen in " << sel.audio_count << ", text in " << sel.text_count << " record(s)\n";
  }
  return run;
}

SweepResult cmd_sweep(const SweepCommandOptions& o, std::ostream& err) {
  const auto joined = join_for(o.gold, o.audio_preds, o.text_preds, o.space, err);
  write_json(o.out_dir / "join_report.json", join_report_to_json(joined.report));
  auto sweep = sweep_weights(joined.pairs, o.sweep);

  write_file(o.out_dir / "sweep_curve.tsv", format_sweep_curve(sweep));
  write_file(o.out_dir / "sweep_curve.svg",
             render_sweep_svg(sweep, "weighted fusion sweep", to_string(o.sweep.metric)));
  OrderedJson s;
  s["best_weight"] = sweep.best_weight;
  s["best_score"] = sweep.best_score;
  s["metric"] = to_string(o.sweep.metric);
  s["grid_step"] = o.sweep.grid_step;
  s["points"] = sweep.curve.size();
  s["records"] = sweep.evaluated_records;
  s["tie_break"] = to_string(o.sweep.tie);
  s["label_space"] = space_suffix(o.space);
  write_json(o.out_dir / "sweep_summary.json", s);
  err << "info: best audio weight " << sweep.best_weight << " (" << to_string(o.sweep.metric) << " "
      << sweep.best_score << ")\n";
  return sweep;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lexicon mapping, fusion and evaluation for audio/lyrics music sentiment predictions", "musent"};
  app.require_subcommand(1);

  std::string lexicon, vocabulary, overrides, clusters, mapping, manifest, audio_preds, text_preds, out_dir;
  std::string label_space = "quadrants", strategy = "max", tie_break = "prefer-text", metric = "macro-f1";
  std::string zero_division = "zero", quadrant_map;
  std::string word_col = "word", valence_col = "valence_mean", arousal_col = "arousal_mean";
  double scale_min = 1.0, scale_max = 9.0;
  std::optional<double> midpoint, weight;
  double grid_step = kDefaultGridStep;
  bool per_cluster = false;

  auto add_gold = [&](CLI::App* cmd, bool with_mapping) {
    cmd->add_option("--manifest", manifest, "Dataset manifest (CSV/TSV with song_id)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--midpoint", midpoint, "Neutral point of the manifest's valence/arousal scale");
    if (with_mapping) {
      cmd->add_option("--mapping", mapping, "Mapping table used to resolve mood_terms")->check(CLI::ExistingFile);
    }
    cmd->add_option("--quadrant-map", quadrant_map, "Translate quadrant column values, e.g. 1=Q1,2=Q2");
  };
  auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out_dir, "Output directory")->required(); };
  auto label_space_check = CLI::IsMember({"quadrants", "valence", "arousal"});
  auto tie_check = CLI::IsMember({"prefer-text", "prefer-audio", "error"});
  auto zero_check = CLI::IsMember({"zero", "skip"});

  auto* map_tags = app.add_subcommand("map-tags", "Map a tag vocabulary onto quadrants through a lexicon");
  map_tags->add_option("--lexicon", lexicon, "ANEW-style ratings file")->required()->check(CLI::ExistingFile);
  map_tags->add_option("--vocabulary", vocabulary, "One term per line")->check(CLI::ExistingFile);
  map_tags->add_option("--mirex-clusters", clusters, "Cluster table (cluster<TAB>moods)")->check(CLI::ExistingFile);
  map_tags->add_option("--overrides", overrides, "Override/exclusion table")->check(CLI::ExistingFile);
  map_tags->add_option("--midpoint", midpoint, "Lexicon scale midpoint (default: centre of the scale)");
  map_tags->add_option("--scale-min", scale_min, "Lowest rating on the lexicon scale");
  map_tags->add_option("--scale-max", scale_max, "Highest rating on the lexicon scale");
  map_tags->add_option("--word-column", word_col);
  map_tags->add_option("--valence-column", valence_col);
  map_tags->add_option("--arousal-column", arousal_col);
  map_tags->add_flag("--per-cluster", per_cluster, "Place each MIREX cluster as a whole");
  add_out(map_tags);

  auto* normalize = app.add_subcommand("normalize", "Derive gold quadrants for a manifest");
  add_gold(normalize, true);
  add_out(normalize);

  auto* evaluate = app.add_subcommand("evaluate", "Score one modality's predictions against gold labels");
  add_gold(evaluate, true);
  evaluate->add_option("--audio-preds", audio_preds)->check(CLI::ExistingFile);
  evaluate->add_option("--text-preds", text_preds)->check(CLI::ExistingFile);
  evaluate->add_option("--label-space", label_space)->check(label_space_check);
  evaluate->add_option("--zero-division", zero_division)->check(zero_check);
  add_out(evaluate);

  auto* fuse = app.add_subcommand("fuse", "Fuse audio and text predictions");
  add_gold(fuse, true);
  fuse->add_option("--audio-preds", audio_preds)->required()->check(CLI::ExistingFile);
  fuse->add_option("--text-preds", text_preds)->required()->check(CLI::ExistingFile);
  auto* fuse_space = fuse->add_option("--label-space", label_space)->check(label_space_check);
  fuse->add_option("--strategy", strategy)->check(CLI::IsMember({"max", "average", "weighted"}));
  fuse->add_option("--weight", weight, "Audio weight for --strategy weighted");
  fuse->add_option("--tie-break", tie_break)->check(tie_check);
  fuse->add_option("--zero-division", zero_division)->check(zero_check);
  add_out(fuse);

  auto* sweep = app.add_subcommand("sweep", "Grid-search the audio weight of weighted fusion");
  add_gold(sweep, true);
  sweep->add_option("--audio-preds", audio_preds)->required()->check(CLI::ExistingFile);
  sweep->add_option("--text-preds", text_preds)->required()->check(CLI::ExistingFile);
  auto* sweep_space = sweep->add_option("--label-space", label_space)->check(label_space_check);
  sweep->add_option("--grid-step", grid_step);
  sweep->add_option("--metric", metric)->check(CLI::IsMember({"macro-f1", "micro-f1", "accuracy"}));
  sweep->add_option("--tie-break", tie_break)->check(tie_check);
  add_out(sweep);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    GoldOptions gold{manifest, midpoint, std::nullopt, {}};
    if (!mapping.empty()) gold.mapping = mapping;
    if (!quadrant_map.empty()) gold.quadrant_remap = parse_remap(quadrant_map);
    const auto zd = zero_division == "skip" ? ZeroDivision::Skip : ZeroDivision::Zero;
    const auto tie = *parse_tie_break(tie_break);

    if (map_tags->parsed()) {
      MapTagsOptions o;
      o.lexicon = lexicon;
      o.schema.word_column = word_col;
      o.schema.valence_column = valence_col;
      o.schema.arousal_column = arousal_col;
      o.schema.scale_min = scale_min;
      o.schema.scale_max = scale_max;
      o.schema.midpoint = midpoint;
      if (!vocabulary.empty()) o.vocabulary = vocabulary;
      if (!clusters.empty()) o.mirex_clusters = clusters;
      if (!overrides.empty()) o.overrides = overrides;
      o.cluster_mapping = per_cluster ? ClusterMapping::PerCluster : ClusterMapping::PerAdjective;
      o.out_dir = out_dir;
      cmd_map_tags(o, err);
    } else if (normalize->parsed()) {
      cmd_normalize({gold, out_dir}, err);
    } else if (evaluate->parsed()) {
      EvaluateOptions o;
      o.gold = gold;
      if (!audio_preds.empty()) o.audio_preds = audio_preds;
      if (!text_preds.empty()) o.text_preds = text_preds;
      o.space = *parse_label_space(label_space);
      o.zero_division = zd;
      o.out_dir = out_dir;
      cmd_evaluate(o, err);
    } else if (fuse->parsed()) {
      FuseOptions o;
      o.gold = gold;
      o.audio_preds = audio_preds;
      o.text_preds = text_preds;
      const auto strat = *parse_fusion_strategy(strategy);
      if (strat == FusionStrategy::Weighted) {
        if (!weight) throw InvalidArgument("--strategy weighted needs --weight");
        o.config = FusionConfig::weighted(*weight, tie);
      } else {
        if (weight) throw InvalidArgument("--weight only applies to --strategy weighted");
        o.config = strat == FusionStrategy::Average ? FusionConfig::average(tie) : FusionConfig::max_probability(tie);
      }
      if (fuse_space->count() > 0) o.space = parse_label_space(label_space);
      o.zero_division = zd;
      o.out_dir = out_dir;
      cmd_fuse(o, err);
    } else if (sweep->parsed()) {
      SweepCommandOptions o;
      o.gold = gold;
      o.audio_preds = audio_preds;
      o.text_preds = text_preds;
      o.sweep.grid_step = grid_step;
      o.sweep.metric = *parse_score_metric(metric);
      o.sweep.tie = tie;
      if (sweep_space->count() > 0) o.space = parse_label_space(label_space);
      o.out_dir = out_dir;
      cmd_sweep(o, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace musent::cli
