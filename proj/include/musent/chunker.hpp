#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "musent/core_model.hpp"

namespace musent {

struct TokenizedText {
  std::vector<std::string> tokens;
  std::string tokenizer_id;
};

inline constexpr std::string_view kWhitespaceTokenizer = "whitespace";

/// Splits on runs of ASCII whitespace.
TokenizedText tokenize_whitespace(std::string_view text);

/// Half-open token range [start, end).
struct TokenRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

struct ChunkPlan {
  std::vector<TokenRange> chunks;
  std::size_t max_tokens = 0;
  std::size_t overlap = 0;

  friend bool operator==(const ChunkPlan&, const ChunkPlan&) = default;
};

inline constexpr std::size_t kDefaultMaxTokens = 512;

/// Greedy left-to-right packing: each chunk starts `max_tokens - overlap`
/// tokens after the previous one and the last chunk ends at the final token.
/// Throws EmptyText for an empty token list and InvalidArgument unless
/// max_tokens >= 1 and overlap < max_tokens.
ChunkPlan plan_chunks(std::size_t token_count, std::size_t max_tokens = kDefaultMaxTokens,
                      std::size_t overlap = 0);
ChunkPlan plan_chunks(const TokenizedText& text, std::size_t max_tokens = kDefaultMaxTokens,
                      std::size_t overlap = 0);

/// Checks that `plan` covers [0, token_count) in order with consecutive chunks
/// overlapping by plan.overlap and no chunk longer than plan.max_tokens.
bool plan_is_valid(const ChunkPlan& plan, std::size_t token_count);

/// The tokens of each chunk.
std::vector<std::vector<std::string>> chunk_tokens(const TokenizedText& text, const ChunkPlan& plan);

enum class ChunkWeighting {
  Uniform,     // plain mean of chunk distributions
  TokenCount,  // mean weighted by chunk length
  MajorityVote,  // share of chunks whose argmax is each label
};

std::optional<ChunkWeighting> parse_chunk_weighting(std::string_view text);
std::string_view to_string(ChunkWeighting w);

/// Combines per-chunk distributions into one per-song distribution.
/// `chunk_lengths` is required for TokenCount and must then match `dists` in
/// size (LengthMismatch otherwise). All distributions must share one label
/// set in one order (MixedLabelSets otherwise).
ClassDistribution aggregate_chunks(std::span<const ClassDistribution> dists,
                                   ChunkWeighting weighting = ChunkWeighting::Uniform,
                                   std::span<const std::size_t> chunk_lengths = {});

}  // namespace musent
