#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "hopforge/corpus.hpp"
#include "hopforge/dense_index.hpp"
#include "hopforge/encoders.hpp"
#include "hopforge/paths.hpp"
#include "hopforge/sparse_index.hpp"
#include "hopforge/text.hpp"

// Recurrent 2-hop retrieval: hop 1 ranks documents against the question, hop 2
// re-encodes the question together with each beam document and ranks the
// continuation. The hop count is fixed at 2 but the per-hop step is generic.

namespace hopforge {

enum class Hop1Candidates { kAll, kSparseTopN };
enum class Hop2Candidates { kAll, kSparseTopN, kHyperlinksOfHop1, kUnionSparseHyperlinks };

struct RetrievalStrategy {
  Hop1Candidates hop1_candidates = Hop1Candidates::kAll;
  Hop2Candidates hop2_candidates = Hop2Candidates::kAll;
  std::uint32_t beam_size = 4;
  std::uint32_t sparse_n = 200;

  void validate() const {
    if (beam_size < 1) throw std::invalid_argument("beam size must be >= 1");
    if (sparse_n < beam_size) throw std::invalid_argument("sparse_n must be >= beam size");
  }

  bool needs_sparse() const {
    return hop1_candidates == Hop1Candidates::kSparseTopN ||
           hop2_candidates == Hop2Candidates::kSparseTopN ||
           hop2_candidates == Hop2Candidates::kUnionSparseHyperlinks;
  }
};

/// CLI strategy names: all | sparse | wiki | sparse+wiki.
inline RetrievalStrategy strategy_from_string(std::string_view name) {
  RetrievalStrategy s;
  if (name == "all") {
    s.hop1_candidates = Hop1Candidates::kAll;
    s.hop2_candidates = Hop2Candidates::kAll;
  } else if (name == "sparse") {
    s.hop1_candidates = Hop1Candidates::kSparseTopN;
    s.hop2_candidates = Hop2Candidates::kSparseTopN;
  } else if (name == "wiki") {
    s.hop1_candidates = Hop1Candidates::kAll;
    s.hop2_candidates = Hop2Candidates::kHyperlinksOfHop1;
  } else if (name == "sparse+wiki") {
    s.hop1_candidates = Hop1Candidates::kSparseTopN;
    s.hop2_candidates = Hop2Candidates::kUnionSparseHyperlinks;
  } else {
    throw std::invalid_argument("unknown strategy: " + std::string(name));
  }
  return s;
}

/// One recurrence step: encode (question, previously retrieved documents),
/// run MIPS over the candidate pool, drop the documents already on the path.
/// encoder_calls, when given, counts the single query encoding performed here.
inline std::vector<MipsHit> retrieve_step(const EncoderParams& params, const DenseIndex& index,
                                          const Corpus& corpus, std::string_view question,
                                          const std::vector<std::string>& prev_doc_ids,
                                          std::size_t k,
                                          const std::optional<std::vector<std::string>>& candidate_ids =
                                              std::nullopt,
                                          std::uint64_t* encoder_calls = nullptr,
                                          unsigned threads = 1) {
  std::vector<const Document*> prev;
  for (const auto& id : prev_doc_ids) prev.push_back(&corpus.doc(id));
  auto qv = encode_query(params, question, prev);
  if (encoder_calls) ++*encoder_calls;

  auto result = index.search(qv, k + prev_doc_ids.size(), candidate_ids, threads);
  std::unordered_set<std::string_view> exclude(prev_doc_ids.begin(), prev_doc_ids.end());
  std::vector<MipsHit> out;
  for (auto& h : result.hits) {
    if (exclude.count(h.doc_id)) continue;
    out.push_back(std::move(h));
    if (out.size() == k) break;
  }
  return out;
}

/// Beam search over 2-hop paths. Path score is the sum of the two hop
/// similarities; unordered duplicate pairs keep the higher-scoring traversal;
/// final order is score descending with ties broken by the ordered doc pair.
/// encoder_calls lands at exactly 1 + beam_size when the corpus can fill the
/// beam (one bare-question encoding plus one per beam document).
inline RetrievalRun beam_search_paths(const EncoderParams& params, const DenseIndex& index,
                                      const Corpus& corpus, const SparseIndex* sparse,
                                      std::string_view qid, std::string_view question,
                                      const RetrievalStrategy& strategy, std::size_t k_paths,
                                      unsigned threads = 1) {
  strategy.validate();
  const std::size_t b = strategy.beam_size;
  if (k_paths > b * b)
    throw std::invalid_argument("k_paths exceeds beam_size^2, beam cannot produce that many paths");
  if (strategy.needs_sparse() && sparse == nullptr)
    throw std::invalid_argument("strategy requires a sparse index");

  RetrievalRun run;
  run.qid = std::string(qid);

  std::optional<std::vector<std::string>> sparse_pool;
  if (strategy.needs_sparse()) {
    std::vector<std::string> pool;
    for (auto& hit : sparse->retrieve(question, strategy.sparse_n, /*require_keyword_match=*/true))
      pool.push_back(std::move(hit.doc_id));
    sparse_pool = std::move(pool);
  }

  std::optional<std::vector<std::string>> hop1_pool;
  if (strategy.hop1_candidates == Hop1Candidates::kSparseTopN) hop1_pool = *sparse_pool;

  auto hop1 =
      retrieve_step(params, index, corpus, question, {}, b, hop1_pool, &run.encoder_calls, threads);

  std::map<std::pair<std::string, std::string>, ReasoningPath> best;
  for (const auto& [d1, s1] : hop1) {
    std::optional<std::vector<std::string>> hop2_pool;
    switch (strategy.hop2_candidates) {
      case Hop2Candidates::kAll:
        break;
      case Hop2Candidates::kSparseTopN:
        hop2_pool = *sparse_pool;
        break;
      case Hop2Candidates::kHyperlinksOfHop1:
        hop2_pool = corpus.adjacent_ids(d1);
        break;
      case Hop2Candidates::kUnionSparseHyperlinks: {
        auto pool = *sparse_pool;
        for (auto& id : corpus.adjacent_ids(d1)) pool.push_back(std::move(id));
        hop2_pool = std::move(pool);
        break;
      }
    }
    auto hop2 =
        retrieve_step(params, index, corpus, question, {d1}, b, hop2_pool, &run.encoder_calls, threads);
    for (const auto& [d2, s2] : hop2) {
      ReasoningPath p;
      p.docs = {d1, d2};
      p.per_hop_scores = {s1, s2};
      p.score = s1 + s2;
      auto key = p.unordered_key();
      auto it = best.find(key);
      if (it == best.end())
        best.emplace(key, std::move(p));
      else if (p.score > it->second.score)
        it->second = std::move(p);
    }
  }

  run.ranked_paths.reserve(best.size());
  for (auto& [key, p] : best) run.ranked_paths.push_back(std::move(p));
  std::sort(run.ranked_paths.begin(), run.ranked_paths.end(),
            [](const ReasoningPath& a, const ReasoningPath& b2) {
              if (a.score != b2.score) return a.score > b2.score;
              return a.docs < b2.docs;
            });
  if (run.ranked_paths.size() > k_paths) run.ranked_paths.resize(k_paths);
  return run;
}

/// Joint question+path scoring hook; neural rerankers plug in here.
using PathScorer = std::function<double(std::string_view question, const ReasoningPath& path)>;

/// Baseline scorer: number of distinct question tokens appearing in the
/// concatenated path text.
inline PathScorer make_lexical_overlap_scorer(const Corpus& corpus) {
  return [&corpus](std::string_view question, const ReasoningPath& path) {
    std::string joined;
    for (const auto& id : path.docs) {
      joined.append(document_text(corpus.doc(id)));
      joined.push_back(' ');
    }
    auto doc_tokens = text::tokenize(joined);
    std::unordered_set<std::string> doc_set(doc_tokens.begin(), doc_tokens.end());
    auto q_tokens = text::tokenize(question);
    std::unordered_set<std::string> counted;
    double score = 0.0;
    for (const auto& t : q_tokens)
      if (doc_set.count(t) && counted.insert(t).second) score += 1.0;
    return score;
  };
}

/// Rescoring stage: the top r paths are rescored and sorted first (stable, so
/// an identity scorer keeps retriever order); the remainder follow unchanged.
/// Total inference cost becomes encoder_calls + r.
inline RetrievalRun rerank_paths(const RetrievalRun& run, std::string_view question,
                                 const PathScorer& scorer, std::size_t r) {
  if (r > run.ranked_paths.size())
    throw std::invalid_argument("rerank input size exceeds available paths");
  RetrievalRun out = run;
  out.reranker_inputs = r;
  if (r == 0) return out;
  for (std::size_t i = 0; i < r; ++i) out.ranked_paths[i].score = scorer(question, run.ranked_paths[i]);
  std::stable_sort(out.ranked_paths.begin(), out.ranked_paths.begin() + static_cast<std::ptrdiff_t>(r),
                   [](const ReasoningPath& a, const ReasoningPath& b) { return a.score > b.score; });
  return out;
}

}  // namespace hopforge
