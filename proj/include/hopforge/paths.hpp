#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hopforge {

/// An ordered 2-document reasoning chain with its retrieval evidence.
/// Evaluation treats the pair as an unordered set.
struct ReasoningPath {
  std::vector<std::string> docs;  // length 2, distinct
  double score = 0.0;             // sum of per_hop_scores
  std::vector<double> per_hop_scores;

  std::pair<std::string, std::string> unordered_key() const {
    if (docs[0] <= docs[1]) return {docs[0], docs[1]};
    return {docs[1], docs[0]};
  }
};

/// One question's ranked paths plus the exact inference cost counters.
struct RetrievalRun {
  std::string qid;
  std::vector<ReasoningPath> ranked_paths;  // descending score
  std::uint64_t encoder_calls = 0;
  std::uint64_t reranker_inputs = 0;

  std::uint64_t total_cost() const { return encoder_calls + reranker_inputs; }
};

inline void write_prediction_line(const RetrievalRun& run, std::ostream& os) {
  nlohmann::ordered_json j;
  j["qid"] = run.qid;
  auto paths = nlohmann::ordered_json::array();
  auto scores = nlohmann::ordered_json::array();
  for (const auto& p : run.ranked_paths) {
    paths.push_back(nlohmann::ordered_json::array({p.docs[0], p.docs[1]}));
    scores.push_back(p.score);
  }
  j["paths"] = std::move(paths);
  j["scores"] = std::move(scores);
  j["encoder_calls"] = run.encoder_calls;
  j["reranker_inputs"] = run.reranker_inputs;
  os << j.dump() << '\n';
}

inline std::vector<RetrievalRun> read_predictions(std::istream& is) {
  std::vector<RetrievalRun> runs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
    RetrievalRun run;
    run.qid = j.at("qid").get<std::string>();
    auto scores = j.at("scores").get<std::vector<double>>();
    auto paths = j.at("paths");
    if (scores.size() != paths.size())
      throw std::runtime_error("predictions line " + std::to_string(line_no) +
                               ": paths/scores length mismatch");
    std::size_t k = 0;
    for (const auto& pj : paths) {
      ReasoningPath p;
      p.docs = pj.get<std::vector<std::string>>();
      if (p.docs.size() != 2)
        throw std::runtime_error("predictions line " + std::to_string(line_no) +
                                 ": path is not a document pair");
      p.score = scores[k++];
      run.ranked_paths.push_back(std::move(p));
    }
    run.encoder_calls = j.value("encoder_calls", 0ull);
    run.reranker_inputs = j.value("reranker_inputs", 0ull);
    runs.push_back(std::move(run));
  }
  return runs;
}

inline std::vector<RetrievalRun> read_predictions_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open predictions file: " + path);
  return read_predictions(is);
}

}  // namespace hopforge
