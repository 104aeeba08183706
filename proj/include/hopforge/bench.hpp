#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopforge/evaluation.hpp"
#include "hopforge/multihop.hpp"

// (beam, rerank-input) sweep producing cost/recall rows. Costs are counted,
// never timed: retrieval charges 1 + b encoder calls and reranking adds its
// input size r, so every row's cost columns are exact integers.

namespace hopforge {

struct BenchQuestion {
  std::string qid;
  std::string question;
};

struct BenchRow {
  std::uint32_t beam;
  std::uint32_t rerank_inputs;
  double mean_encoder_calls;
  double mean_total_cost;
  MetricReport report;
};

inline std::vector<BenchRow> bench_efficiency(
    const Corpus& corpus, const EncoderParams& params, const DenseIndex& dense,
    const SparseIndex* sparse, const RetrievalStrategy& base_strategy,
    const std::vector<BenchQuestion>& questions, const std::vector<GoldRecord>& gold,
    const std::vector<std::size_t>& k_list,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& grid, unsigned threads = 1) {
  if (questions.empty()) throw std::invalid_argument("bench: no questions");
  auto scorer = make_lexical_overlap_scorer(corpus);

  std::vector<BenchRow> rows;
  for (const auto& [b, r] : grid) {
    RetrievalStrategy strategy = base_strategy;
    strategy.beam_size = b;
    if (strategy.sparse_n < b) strategy.sparse_n = b;
    std::size_t k_paths = static_cast<std::size_t>(b) * b;

    std::vector<RetrievalRun> runs;
    runs.reserve(questions.size());
    for (const auto& q : questions) {
      auto run = beam_search_paths(params, dense, corpus, sparse, q.qid, q.question, strategy,
                                   k_paths, threads);
      if (r > 0) {
        if (run.ranked_paths.size() < r)
          throw std::runtime_error("bench: beam " + std::to_string(b) + " produced only " +
                                   std::to_string(run.ranked_paths.size()) +
                                   " paths for qid " + q.qid + ", rerank budget " +
                                   std::to_string(r) + " is not satisfiable");
        run = rerank_paths(run, q.question, scorer, r);
      }
      runs.push_back(std::move(run));
    }

    BenchRow row;
    row.beam = b;
    row.rerank_inputs = r;
    row.report = evaluate_run(gold, runs, corpus, k_list);
    row.mean_encoder_calls = row.report.mean_encoder_calls;
    row.mean_total_cost = row.report.mean_total_cost;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_bench_csv(const std::vector<BenchRow>& rows,
                            const std::vector<std::size_t>& k_list, std::ostream& os) {
  os << "beam,rerank_inputs,encoder_calls,total_cost";
  for (std::size_t k : k_list) os << ",pathr_at_" << k;
  for (std::size_t k : k_list)
    if (k % 2 == 0) os << ",r_at_" << k;
  for (std::size_t k : k_list) os << ",ar_at_" << k;
  os << '\n';
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (const auto& row : rows) {
    os << row.beam << ',' << row.rerank_inputs << ',' << num(row.mean_encoder_calls) << ','
       << num(row.mean_total_cost);
    for (std::size_t k : k_list) os << ',' << num(row.report.pathr_at.at(k));
    for (std::size_t k : k_list)
      if (k % 2 == 0) os << ',' << num(row.report.r_at.at(k));
    for (std::size_t k : k_list)
      os << ',' << num(row.report.ar_at.count(k) ? row.report.ar_at.at(k) : 0.0);
    os << '\n';
  }
}

}  // namespace hopforge
