#include "musent/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "musent/delimited.hpp"
#include "musent/errors.hpp"

namespace musent {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::size_t require_column(const DelimitedTable& t, const std::string& name,
                           const std::filesystem::path& path) {
  auto col = t.column(name);
  if (!col) throw ParseError(path.string() + ": missing column '" + name + "'");
  return *col;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Lexicon::Lexicon(std::vector<LexiconEntry> entries, double scale_min, double scale_max, double midpoint)
    : scale_min_(scale_min), scale_max_(scale_max), midpoint_(midpoint) {
  if (!(scale_min < midpoint && midpoint < scale_max)) {
    throw InvalidArgument("lexicon midpoint must lie strictly inside the scale");
  }
  for (auto& e : entries) {
    e.word = to_lower(trim(e.word));
    if (e.word.empty()) throw ParseError("lexicon entry with an empty word");
    for (double v : {e.valence_mean, e.arousal_mean}) {
      if (v < scale_min || v > scale_max) {
        throw OutOfScaleRating("rating " + std::to_string(v) + " for '" + e.word + "' outside [" +
                               std::to_string(scale_min) + ", " + std::to_string(scale_max) + "]");
      }
    }
    std::string key = e.word;
    if (entries_.contains(key)) throw DuplicateWord("duplicate lexicon word '" + key + "'");
    entries_.emplace(std::move(key), std::move(e));
  }
}

const LexiconEntry* Lexicon::find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon load_lexicon(const std::filesystem::path& path, const LexiconSchema& schema) {
  const auto table = read_delimited(path, schema.delimiter);
  const auto word_col = require_column(table, schema.word_column, path);
  const auto v_col = require_column(table, schema.valence_column, path);
  const auto a_col = require_column(table, schema.arousal_column, path);
  std::optional<std::size_t> vsd_col;
  std::optional<std::size_t> asd_col;
  if (schema.valence_sd_column) vsd_col = require_column(table, *schema.valence_sd_column, path);
  if (schema.arousal_sd_column) asd_col = require_column(table, *schema.arousal_sd_column, path);

  auto number = [&](const DelimitedTable::Row& row, std::size_t col, const std::string& what) {
    auto v = parse_double(row.cells[col]);
    if (!v) {
      throw ParseError(where(path, row.line) + ": non-numeric " + what + " '" + row.cells[col] + "'");
    }
    return *v;
  };

  std::vector<LexiconEntry> entries;
  std::set<std::string> seen;
  entries.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    LexiconEntry e;
    e.word = to_lower(trim(row.cells[word_col]));
    if (e.word.empty()) throw ParseError(where(path, row.line) + ": empty word");
    if (!seen.insert(e.word).second) {
      throw DuplicateWord(where(path, row.line) + ": duplicate word '" + e.word + "'");
    }
    e.valence_mean = number(row, v_col, "valence");
    e.arousal_mean = number(row, a_col, "arousal");
    for (auto col : {v_col, a_col}) {
      const double v = col == v_col ? e.valence_mean : e.arousal_mean;
      if (v < schema.scale_min || v > schema.scale_max) {
        throw OutOfScaleRating(where(path, row.line) + ": rating " + row.cells[col] + " for '" + e.word +
                               "' outside [" + std::to_string(schema.scale_min) + ", " +
                               std::to_string(schema.scale_max) + "]");
      }
    }
    if (vsd_col) e.valence_sd = number(row, *vsd_col, "valence sd");
    if (asd_col) e.arousal_sd = number(row, *asd_col, "arousal sd");
    entries.push_back(std::move(e));
  }
  const double midpoint = schema.midpoint.value_or((schema.scale_min + schema.scale_max) / 2.0);
  return Lexicon(std::move(entries), schema.scale_min, schema.scale_max, midpoint);
}

std::vector<std::string> term_words(std::string_view term) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : term) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '-') {
      if (!cur.empty()) words.push_back(to_lower(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(to_lower(cur));
  return words;
}

TermRating term_rating(const Lexicon& lex, std::string_view term) {
  const std::string whole = to_lower(trim(term));
  if (const auto* e = lex.find(whole)) {
    return {VAPoint(e->valence_mean, e->arousal_mean), 1, 1};
  }
  const auto words = term_words(whole);
  double v = 0.0;
  double a = 0.0;
  std::size_t found = 0;
  for (const auto& w : words) {
    if (const auto* e = lex.find(w)) {
      v += e->valence_mean;
      a += e->arousal_mean;
      ++found;
    }
  }
  if (found == 0) throw NotInLexicon("'" + whole + "' is not in the lexicon");
  return {VAPoint(v / static_cast<double>(found), a / static_cast<double>(found)), found, words.size()};
}

Quadrant term_quadrant(const Lexicon& lex, std::string_view term) {
  return quadrant_of(term_rating(lex, term).point, lex.midpoint());
}

std::string decision_to_string(const MappingDecision& d) {
  return std::visit(Overloaded{[](Quadrant q) { return std::string(to_string(q)); },
                               [](Excluded) { return std::string("excluded"); },
                               [](Unmapped) { return std::string("unmapped"); }},
                    d);
}

std::optional<MappingDecision> parse_decision(std::string_view text) {
  const std::string t = trim(text);
  if (auto q = parse_quadrant(t)) return MappingDecision{*q};
  const std::string lower = to_lower(t);
  if (lower == "excluded") return MappingDecision{Excluded{}};
  if (lower == "unmapped") return MappingDecision{Unmapped{}};
  return std::nullopt;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::LexiconDerived: return "lexicon-derived";
    case Provenance::ManualOverride: return "manual-override";
    case Provenance::ManualExclusion: return "manual-exclusion";
  }
  return "?";
}

std::optional<Provenance> parse_provenance(std::string_view text) {
  const std::string t = to_lower(trim(text));
  for (auto p : {Provenance::LexiconDerived, Provenance::ManualOverride, Provenance::ManualExclusion}) {
    if (to_string(p) == t) return p;
  }
  return std::nullopt;
}

MappingTable::MappingTable(std::vector<MappingRule> rules) : rules_(std::move(rules)) {
  std::sort(rules_.begin(), rules_.end(),
            [](const MappingRule& a, const MappingRule& b) { return a.term < b.term; });
  auto dup = std::adjacent_find(rules_.begin(), rules_.end(),
                                [](const MappingRule& a, const MappingRule& b) { return a.term == b.term; });
  if (dup != rules_.end()) throw InvalidArgument("mapping table repeats term '" + dup->term + "'");
}

const MappingRule* MappingTable::find(std::string_view term) const {
  auto it = std::lower_bound(rules_.begin(), rules_.end(), term,
                             [](const MappingRule& r, std::string_view t) { return r.term < t; });
  if (it == rules_.end() || it->term != term) return nullptr;
  return &*it;
}

MappingTable load_mapping_table(const std::filesystem::path& path) {
  const auto table = read_delimited(path);
  const auto term_col = require_column(table, "term", path);
  const auto decision_col = require_column(table, "decision", path);
  const auto prov_col = table.column("provenance");

  std::vector<MappingRule> rules;
  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    MappingRule rule;
    rule.term = to_lower(trim(row.cells[term_col]));
    if (rule.term.empty()) throw ParseError(where(path, row.line) + ": empty term");
    if (!seen.insert(rule.term).second) {
      throw ParseError(where(path, row.line) + ": term '" + rule.term + "' appears twice");
    }
    auto decision = parse_decision(row.cells[decision_col]);
    if (!decision) {
      throw ParseError(where(path, row.line) + ": unknown decision '" + row.cells[decision_col] + "'");
    }
    rule.decision = *decision;
    if (prov_col && !row.cells[*prov_col].empty()) {
      auto prov = parse_provenance(row.cells[*prov_col]);
      if (!prov) {
        throw ParseError(where(path, row.line) + ": unknown provenance '" + row.cells[*prov_col] + "'");
      }
      rule.provenance = *prov;
    } else {
      rule.provenance = std::holds_alternative<Excluded>(rule.decision) ? Provenance::ManualExclusion
                                                                       : Provenance::ManualOverride;
    }
    rules.push_back(std::move(rule));
  }
  return MappingTable(std::move(rules));
}

std::string format_mapping_table(const MappingTable& table) {
  std::string out = "term\tdecision\tprovenance\n";
  for (const auto& r : table.rules()) {
    out += escape_field(r.term, '\t');
    out += '\t';
    out += decision_to_string(r.decision);
    out += '\t';
    out += to_string(r.provenance);
    out += '\n';
  }
  return out;
}

std::vector<std::string> MappingResult::unmapped_terms() const {
  std::vector<std::string> out;
  for (const auto& r : table.rules()) {
    if (std::holds_alternative<Unmapped>(r.decision)) out.push_back(r.term);
  }
  return out;
}

namespace {

// Places one term by an already-computed point, or records why it could not.
MappingRule place(const std::string& term, const std::optional<VAPoint>& point, double midpoint,
                  const std::string& missing_reason, std::vector<MappingDiagnostic>& diags) {
  if (!point) {
    diags.push_back({term, missing_reason});
    return {term, Unmapped{}, Provenance::LexiconDerived};
  }
  try {
    return {term, quadrant_of(*point, midpoint), Provenance::LexiconDerived};
  } catch (const AmbiguousPoint& e) {
    diags.push_back({term, std::string("ambiguous rating: ") + e.what()});
    return {term, Unmapped{}, Provenance::LexiconDerived};
  }
}

std::set<std::string> normalized_terms(const std::vector<std::string>& vocabulary) {
  std::set<std::string> terms;
  for (const auto& t : vocabulary) {
    auto n = to_lower(trim(t));
    if (!n.empty()) terms.insert(std::move(n));
  }
  return terms;
}

void warn_foreign_overrides(const std::set<std::string>& terms, const MappingTable& overrides,
                            std::vector<MappingDiagnostic>& diags) {
  for (const auto& r : overrides.rules()) {
    if (!terms.contains(r.term)) diags.push_back({r.term, "override term is not in the vocabulary"});
  }
}

}  // namespace

MappingResult build_mapping_table(const std::vector<std::string>& vocabulary, const Lexicon& lex,
                                  const MappingTable& overrides) {
  MappingResult result;
  const auto terms = normalized_terms(vocabulary);
  warn_foreign_overrides(terms, overrides, result.diagnostics);

  std::vector<MappingRule> rules;
  rules.reserve(terms.size());
  for (const auto& term : terms) {
    if (const auto* o = overrides.find(term)) {
      rules.push_back({term, o->decision, o->provenance});
      continue;
    }
    std::optional<VAPoint> point;
    try {
      point = term_rating(lex, term).point;
    } catch (const NotInLexicon&) {
    }
    rules.push_back(place(term, point, lex.midpoint(), "not in lexicon", result.diagnostics));
  }
  result.table = MappingTable(std::move(rules));
  return result;
}

std::vector<std::string> load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    terms.push_back(std::move(t));
  }
  return terms;
}

std::vector<MoodCluster> load_mood_clusters(const std::filesystem::path& path) {
  const auto table = read_delimited(path, '\t');
  const auto name_col = require_column(table, "cluster", path);
  const auto moods_col = require_column(table, "moods", path);
  std::vector<MoodCluster> clusters;
  for (const auto& row : table.rows) {
    MoodCluster c;
    c.name = row.cells[name_col];
    for (const auto& part : split(row.cells[moods_col], ',')) {
      auto entry = trim(part);
      if (!entry.empty()) c.entries.push_back(std::move(entry));
    }
    if (c.entries.empty()) throw ParseError(where(path, row.line) + ": cluster has no moods");
    clusters.push_back(std::move(c));
  }
  return clusters;
}

std::vector<std::string> split_cluster_entry(std::string_view entry) {
  std::vector<std::string> terms;
  for (const auto& part : split(entry, '/')) {
    auto t = to_lower(trim(part));
    if (!t.empty()) terms.push_back(std::move(t));
  }
  return terms;
}

MappingResult map_mirex_cluster_terms(const std::vector<MoodCluster>& clusters, const Lexicon& lex,
                                      const MappingTable& overrides, ClusterMapping mode) {
  if (mode == ClusterMapping::PerAdjective) {
    std::vector<std::string> vocabulary;
    for (const auto& c : clusters) {
      for (const auto& entry : c.entries) {
        for (auto& t : split_cluster_entry(entry)) vocabulary.push_back(std::move(t));
      }
    }
    return build_mapping_table(vocabulary, lex, overrides);
  }

  MappingResult result;
  std::set<std::string> all_terms;
  std::vector<MappingRule> rules;
  for (const auto& c : clusters) {
    std::vector<std::string> terms;
    for (const auto& entry : c.entries) {
      for (auto& t : split_cluster_entry(entry)) terms.push_back(std::move(t));
    }
    double v = 0.0;
    double a = 0.0;
    std::size_t found = 0;
    for (const auto& t : terms) {
      try {
        const auto r = term_rating(lex, t);
        v += r.point.valence;
        a += r.point.arousal;
        ++found;
      } catch (const NotInLexicon&) {
        result.diagnostics.push_back({t, "not in lexicon; cluster '" + c.name + "' placed without it"});
      }
    }
    std::optional<VAPoint> centroid;
    if (found > 0) centroid = VAPoint(v / static_cast<double>(found), a / static_cast<double>(found));
    for (const auto& t : terms) {
      if (!all_terms.insert(t).second) {
        result.diagnostics.push_back({t, "appears in more than one cluster; first cluster kept"});
        continue;
      }
      if (const auto* o = overrides.find(t)) {
        rules.push_back({t, o->decision, o->provenance});
        continue;
      }
      rules.push_back(place(t, centroid, lex.midpoint(), "cluster '" + c.name + "' has no rated adjective",
                            result.diagnostics));
    }
  }
  warn_foreign_overrides(all_terms, overrides, result.diagnostics);
  result.table = MappingTable(std::move(rules));
  return result;
}

}  // namespace musent
