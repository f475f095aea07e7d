#include "musent/chunker.hpp"

#include <cctype>

#include "musent/errors.hpp"

namespace musent {

TokenizedText tokenize_whitespace(std::string_view text) {
  TokenizedText out;
  out.tokenizer_id = std::string(kWhitespaceTokenizer);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.tokens.emplace_back(text.substr(start, i - start));
  }
  return out;
}

ChunkPlan plan_chunks(std::size_t token_count, std::size_t max_tokens, std::size_t overlap) {
  if (max_tokens < 1) throw InvalidArgument("max_tokens must be at least 1");
  if (overlap >= max_tokens) throw InvalidArgument("overlap must be smaller than max_tokens");
  if (token_count == 0) throw EmptyText("cannot chunk an empty text");

  ChunkPlan plan;
  plan.max_tokens = max_tokens;
  plan.overlap = overlap;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = std::min(start + max_tokens, token_count);
    plan.chunks.push_back({start, end});
    if (end == token_count) break;
    start = end - overlap;
  }
  return plan;
}

ChunkPlan plan_chunks(const TokenizedText& text, std::size_t max_tokens, std::size_t overlap) {
  return plan_chunks(text.tokens.size(), max_tokens, overlap);
}

bool plan_is_valid(const ChunkPlan& plan, std::size_t token_count) {
  if (plan.chunks.empty() || plan.max_tokens == 0 || plan.overlap >= plan.max_tokens) return false;
  if (plan.chunks.front().start != 0 || plan.chunks.back().end != token_count) return false;
  for (std::size_t i = 0; i < plan.chunks.size(); ++i) {
    const auto& c = plan.chunks[i];
    if (c.end <= c.start || c.size() > plan.max_tokens) return false;
    if (i + 1 < plan.chunks.size()) {
      const auto& next = plan.chunks[i + 1];
      if (next.start + plan.overlap != c.end || next.end <= c.end) return false;
    }
  }
  return true;
}

std::vector<std::vector<std::string>> chunk_tokens(const TokenizedText& text, const ChunkPlan& plan) {
  std::vector<std::vector<std::string>> out;
  out.reserve(plan.chunks.size());
  for (const auto& c : plan.chunks) {
    if (c.end > text.tokens.size() || c.start > c.end) throw InvalidArgument("chunk range out of bounds");
    out.emplace_back(text.tokens.begin() + static_cast<std::ptrdiff_t>(c.start),
                     text.tokens.begin() + static_cast<std::ptrdiff_t>(c.end));
  }
  return out;
}

std::optional<ChunkWeighting> parse_chunk_weighting(std::string_view text) {
  for (auto w : {ChunkWeighting::Uniform, ChunkWeighting::TokenCount, ChunkWeighting::MajorityVote}) {
    if (to_string(w) == text) return w;
  }
  return std::nullopt;
}

std::string_view to_string(ChunkWeighting w) {
  switch (w) {
    case ChunkWeighting::Uniform: return "uniform";
    case ChunkWeighting::TokenCount: return "token-count";
    case ChunkWeighting::MajorityVote: return "majority-vote";
  }
  return "?";
}

ClassDistribution aggregate_chunks(std::span<const ClassDistribution> dists, ChunkWeighting weighting,
                                   std::span<const std::size_t> chunk_lengths) {
  if (dists.empty()) throw EmptyDataset("no chunk distributions to aggregate");
  const LabelSet& labels = dists.front().labels();
  for (const auto& d : dists) {
    if (d.labels() != labels) throw MixedLabelSets("chunk distributions use different label sets");
  }
  if (weighting == ChunkWeighting::TokenCount && chunk_lengths.size() != dists.size()) {
    throw LengthMismatch("token-count weighting needs one length per chunk");
  }
  if (weighting != ChunkWeighting::TokenCount && !chunk_lengths.empty() &&
      chunk_lengths.size() != dists.size()) {
    throw LengthMismatch("chunk_lengths does not match the number of chunks");
  }

  std::vector<double> scores(labels.size(), 0.0);
  double total_weight = 0.0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    switch (weighting) {
      case ChunkWeighting::Uniform:
        for (std::size_t k = 0; k < scores.size(); ++k) scores[k] += dists[i].prob(k);
        total_weight += 1.0;
        break;
      case ChunkWeighting::TokenCount: {
        const auto w = static_cast<double>(chunk_lengths[i]);
        for (std::size_t k = 0; k < scores.size(); ++k) scores[k] += w * dists[i].prob(k);
        total_weight += w;
        break;
      }
      case ChunkWeighting::MajorityVote:
        scores[dists[i].argmax()] += 1.0;
        total_weight += 1.0;
        break;
    }
  }
  if (!(total_weight > 0.0)) throw InvalidArgument("chunk weights sum to zero");
  for (double& s : scores) s /= total_weight;
  return ClassDistribution::from_scores(labels, scores);
}

}  // namespace musent
