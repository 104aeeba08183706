#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hopforge/corpus.hpp"
#include "hopforge/encoders.hpp"
#include "hopforge/rng.hpp"
#include "hopforge/sparse_index.hpp"
#include "hopforge/weak_supervision.hpp"

// Contrastive next-document training for the linear dual encoder. Each item's
// softmax runs over its positive, every other item's positive (in-batch
// negatives) and its own mined extra negatives.

namespace hopforge {

struct BatchItem {
  std::string question;
  std::vector<std::string> prev_doc_ids;  // empty at hop 1
  std::string positive_id;
  std::vector<std::string> extra_negative_ids;
  int hop = 1;
};

struct TrainingBatch {
  std::vector<BatchItem> items;

  void validate() const {
    if (items.empty()) throw std::invalid_argument("batch must be non-empty");
    for (const auto& it : items)
      for (const auto& n : it.extra_negative_ids)
        if (n == it.positive_id)
          throw std::invalid_argument("positive appears in its own extra negatives: " + n);
  }
};

struct LossReport {
  double loss = 0.0;
  std::vector<std::size_t> per_item_rank_of_positive;  // 1-based
  double gradient_norm = 0.0;
};

struct NdpGradient {
  Matrix query_grad;
  Matrix doc_grad;  // unused when the projection is shared

  double frobenius_norm() const {
    double sq = 0.0;
    for (double x : query_grad.data) sq += x * x;
    for (double x : doc_grad.data) sq += x * x;
    return std::sqrt(sq);
  }
};

namespace detail {

struct EncodedDoc {
  SparseVec features;
  std::vector<double> vec;
};

struct NdpEval {
  LossReport report;
  NdpGradient grad;
};

/// Candidate ids for one item: its positive first, then the other items'
/// positives in batch order, then its extra negatives; duplicates keep the
/// earliest (so a duplicate positive never re-enters as a negative).
inline std::vector<std::string> item_candidates(const TrainingBatch& batch, std::size_t item_idx) {
  const auto& item = batch.items[item_idx];
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto add = [&](const std::string& id) {
    if (seen.insert(id).second) out.push_back(id);
  };
  add(item.positive_id);
  for (std::size_t j = 0; j < batch.items.size(); ++j)
    if (j != item_idx) add(batch.items[j].positive_id);
  for (const auto& id : item.extra_negative_ids) add(id);
  return out;
}

inline NdpEval ndp_forward_backward(const EncoderParams& params, const Corpus& corpus,
                                    const TrainingBatch& batch) {
  params.validate();
  batch.validate();

  const Matrix& pq = params.query_proj;
  const Matrix& pd = params.doc_side();

  std::unordered_map<std::string, EncodedDoc> docs;
  auto doc_enc = [&](const std::string& id) -> const EncodedDoc& {
    auto it = docs.find(id);
    if (it == docs.end()) {
      EncodedDoc e;
      e.features = featurize(document_input_text(params, corpus.doc(id)), params.hash_buckets);
      e.vec = project(pd, e.features);
      it = docs.emplace(id, std::move(e)).first;
    }
    return it->second;
  };

  NdpEval ev;
  ev.grad.query_grad = Matrix(params.dim, params.hash_buckets);
  if (!params.shared_projection) ev.grad.doc_grad = Matrix(params.dim, params.hash_buckets);
  Matrix& gq = ev.grad.query_grad;
  Matrix& gd = params.shared_projection ? ev.grad.query_grad : ev.grad.doc_grad;

  const double inv_b = 1.0 / static_cast<double>(batch.items.size());
  double total_loss = 0.0;

  for (std::size_t i = 0; i < batch.items.size(); ++i) {
    const auto& item = batch.items[i];
    std::vector<const Document*> prev;
    for (const auto& id : item.prev_doc_ids) prev.push_back(&corpus.doc(id));
    SparseVec fq = featurize(query_input_text(params, item.question, prev), params.hash_buckets);
    std::vector<double> qv = project(pq, fq);

    auto cand = item_candidates(batch, i);
    std::vector<double> scores(cand.size());
    for (std::size_t c = 0; c < cand.size(); ++c) scores[c] = similarity(qv, doc_enc(cand[c]).vec);

    double mx = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores) sum += std::exp(s - mx);
    double lse = mx + std::log(sum);
    total_loss += lse - scores[0];  // candidate 0 is the positive

    std::size_t rank = 1;
    for (std::size_t c = 1; c < cand.size(); ++c)
      if (scores[c] > scores[0] || (scores[c] == scores[0] && cand[c] < cand[0])) ++rank;
    ev.report.per_item_rank_of_positive.push_back(rank);

    // softmax cross-entropy through the bilinear similarity:
    //   d loss / d P_Q = sum_c (p_c - [c == pos]) * dv_c (outer) f_q
    //   d loss / d P_D = sum_c (p_c - [c == pos]) * qv   (outer) f_c
    std::vector<double> weighted_doc(params.dim, 0.0);
    for (std::size_t c = 0; c < cand.size(); ++c) {
      double coeff = std::exp(scores[c] - lse) - (c == 0 ? 1.0 : 0.0);
      const EncodedDoc& e = doc_enc(cand[c]);
      for (std::uint32_t r = 0; r < params.dim; ++r) weighted_doc[r] += coeff * e.vec[r];
      double scale = coeff * inv_b;
      for (const auto& [bucket, w] : e.features.entries)
        for (std::uint32_t r = 0; r < params.dim; ++r)
          gd.data[r * params.hash_buckets + bucket] += scale * qv[r] * w;
    }
    for (const auto& [bucket, w] : fq.entries)
      for (std::uint32_t r = 0; r < params.dim; ++r)
        gq.data[r * params.hash_buckets + bucket] += inv_b * weighted_doc[r] * w;
  }

  ev.report.loss = total_loss * inv_b;
  ev.report.gradient_norm = ev.grad.frobenius_norm();
  return ev;
}

}  // namespace detail

/// Mean negative log softmax probability of each item's positive.
inline LossReport ndp_loss(const EncoderParams& params, const Corpus& corpus,
                           const TrainingBatch& batch) {
  return detail::ndp_forward_backward(params, corpus, batch).report;
}

/// Exact analytic gradient of ndp_loss over the projection matrices.
inline NdpGradient ndp_loss_grad(const EncoderParams& params, const Corpus& corpus,
                                 const TrainingBatch& batch) {
  return std::move(detail::ndp_forward_backward(params, corpus, batch).grad);
}

/// Top-k TF-IDF hits for the question with the positives removed. The keyword
/// filter is off so the ranking covers the whole corpus and "top-k excluding
/// positives" stays well defined even for term-free overlaps.
inline std::vector<std::string> mine_tfidf_negatives(const SparseIndex& index,
                                                     std::string_view question,
                                                     const std::vector<std::string>& positive_ids,
                                                     std::size_t k) {
  if (k == 0) return {};
  std::unordered_set<std::string> pos(positive_ids.begin(), positive_ids.end());
  auto hits = index.retrieve(question, k + pos.size(), /*require_keyword_match=*/false);
  std::vector<std::string> out;
  for (const auto& h : hits) {
    if (pos.count(h.doc_id)) continue;
    out.push_back(h.doc_id);
    if (out.size() == k) break;
  }
  return out;
}

struct TrainConfig {
  std::uint32_t epochs = 15;
  std::uint32_t batch_size = 32;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
  std::uint32_t tfidf_negatives = 2;
};

struct EpochStats {
  std::uint32_t epoch;
  double mean_loss;
  double mean_rank_hop1;
  double mean_rank_hop2;
};

struct TrainOutcome {
  EncoderParams params;
  std::vector<EpochStats> history;
};

inline void write_history_csv(const std::vector<EpochStats>& history, std::ostream& os) {
  os << "epoch,mean_loss,mean_rank_hop1,mean_rank_hop2\n";
  char buf[160];
  for (const auto& e : history) {
    std::snprintf(buf, sizeof buf, "%u,%.17g,%.17g,%.17g\n", e.epoch, e.mean_loss,
                  e.mean_rank_hop1, e.mean_rank_hop2);
    os << buf;
  }
}

/// SGD fine-tuning. Every triple trains both hops: (question -> chain[0]) and
/// (question + chain[0] -> chain[1]). Items shuffle per epoch under the run
/// seed and chunk into batch_size batches, so in-batch negatives mix hops.
inline TrainOutcome train(const EncoderParams& initial, const std::vector<TrainingTriple>& triples,
                          const Corpus& corpus, const TrainConfig& config) {
  if (triples.empty()) throw std::invalid_argument("cannot train on an empty triple stream");
  for (const auto& t : triples) {
    if (t.chain.size() != 2 || t.chain[0] == t.chain[1])
      throw std::invalid_argument("triple " + t.qid + " has an invalid chain");
    for (const auto& id : t.chain)
      if (!corpus.has_id(id))
        throw std::invalid_argument("triple " + t.qid + " references unknown document " + id);
  }

  std::vector<BatchItem> items;
  items.reserve(triples.size() * 2);
  {
    SparseIndex mining_index;
    if (config.tfidf_negatives > 0) mining_index = SparseIndex::build(corpus);
    for (const auto& t : triples) {
      std::vector<std::string> negs;
      if (config.tfidf_negatives > 0)
        negs = mine_tfidf_negatives(mining_index, t.question, t.chain, config.tfidf_negatives);
      items.push_back({t.question, {}, t.chain[0], negs, 1});
      items.push_back({t.question, {t.chain[0]}, t.chain[1], negs, 2});
    }
  }

  TrainOutcome out;
  out.params = initial;
  Rng rng(config.seed);
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    double rank_sum[2] = {0.0, 0.0};
    std::size_t hop_count[2] = {0, 0};

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      TrainingBatch batch;
      std::size_t end = std::min(order.size(), start + config.batch_size);
      for (std::size_t i = start; i < end; ++i) batch.items.push_back(items[order[i]]);

      auto ev = detail::ndp_forward_backward(out.params, corpus, batch);
      loss_sum += ev.report.loss * static_cast<double>(batch.items.size());
      for (std::size_t i = 0; i < batch.items.size(); ++i) {
        int h = batch.items[i].hop - 1;
        rank_sum[h] += static_cast<double>(ev.report.per_item_rank_of_positive[i]);
        hop_count[h]++;
      }

      double lr = config.learning_rate;
      auto& pq = out.params.query_proj;
      for (std::size_t x = 0; x < pq.data.size(); ++x) pq.data[x] -= lr * ev.grad.query_grad.data[x];
      if (!out.params.shared_projection) {
        auto& pd = out.params.doc_proj;
        for (std::size_t x = 0; x < pd.data.size(); ++x) pd.data[x] -= lr * ev.grad.doc_grad.data[x];
      }
    }

    EpochStats st;
    st.epoch = epoch + 1;
    st.mean_loss = loss_sum / static_cast<double>(items.size());
    st.mean_rank_hop1 = hop_count[0] ? rank_sum[0] / static_cast<double>(hop_count[0]) : 0.0;
    st.mean_rank_hop2 = hop_count[1] ? rank_sum[1] / static_cast<double>(hop_count[1]) : 0.0;
    out.history.push_back(st);
  }
  return out;
}

}  // namespace hopforge
