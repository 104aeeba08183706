#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hopforge/corpus.hpp"
#include "hopforge/paths.hpp"
#include "hopforge/text.hpp"

namespace hopforge {

struct GoldRecord {
  std::string qid;
  std::set<std::string> support;  // exactly 2 document ids
  std::string answer;

  void validate() const {
    if (support.size() != 2)
      throw std::invalid_argument("gold record " + qid + " must have exactly 2 support documents");
  }
};

/// R@K: 1 iff the gold pair is covered by the union of documents in the first
/// K/2 paths. K must be even; the union over half as many 2-document paths is
/// what makes K a document budget.
inline int recall_at_k(const GoldRecord& gold, const RetrievalRun& run, std::size_t k) {
  if (k == 0 || k % 2 != 0) throw std::invalid_argument("R@K requires even K >= 2");
  std::set<std::string> pool;
  std::size_t n_paths = std::min(run.ranked_paths.size(), k / 2);
  for (std::size_t i = 0; i < n_paths; ++i)
    for (const auto& d : run.ranked_paths[i].docs) pool.insert(d);
  return std::includes(pool.begin(), pool.end(), gold.support.begin(), gold.support.end()) ? 1 : 0;
}

/// PathR@K: 1 iff some path among the first K equals the gold pair as a set.
inline int path_recall_at_k(const GoldRecord& gold, const RetrievalRun& run, std::size_t k) {
  if (k < 1) throw std::invalid_argument("PathR@K requires K >= 1");
  std::size_t n_paths = std::min(run.ranked_paths.size(), k);
  for (std::size_t i = 0; i < n_paths; ++i) {
    const auto& docs = run.ranked_paths[i].docs;
    std::set<std::string> s(docs.begin(), docs.end());
    if (s == gold.support) return 1;
  }
  return 0;
}

/// AR@K: 1 iff some document in the first K paths contains the answer text,
/// ASCII case-insensitively, anywhere in its title or sentences.
inline int answer_recall_at_k(const GoldRecord& gold, const RetrievalRun& run, const Corpus& corpus,
                              std::size_t k) {
  if (k < 1) throw std::invalid_argument("AR@K requires K >= 1");
  if (gold.answer.empty()) throw std::invalid_argument("AR@K requires a gold answer");
  std::size_t n_paths = std::min(run.ranked_paths.size(), k);
  for (std::size_t i = 0; i < n_paths; ++i)
    for (const auto& d : run.ranked_paths[i].docs)
      if (corpus.has_id(d) && text::contains_ci(document_text(corpus.doc(d)), gold.answer)) return 1;
  return 0;
}

/// Document-level supporting-pair EM and F1 for the top-1 path.
inline std::pair<int, double> support_em_f1(const GoldRecord& gold,
                                            const std::vector<std::string>& predicted_pair) {
  std::set<std::string> pred(predicted_pair.begin(), predicted_pair.end());
  if (pred == gold.support) return {1, 1.0};
  std::size_t inter = 0;
  for (const auto& d : pred)
    if (gold.support.count(d)) ++inter;
  if (inter == 0 || pred.empty()) return {0, 0.0};
  double p = static_cast<double>(inter) / static_cast<double>(pred.size());
  double r = static_cast<double>(inter) / static_cast<double>(gold.support.size());
  return {0, 2.0 * p * r / (p + r)};
}

struct MetricReport {
  std::map<std::size_t, double> r_at;      // even K only
  std::map<std::size_t, double> pathr_at;
  std::map<std::size_t, double> ar_at;
  double support_em = 0.0;
  double support_f1 = 0.0;
  double mean_encoder_calls = 0.0;
  double mean_reranker_inputs = 0.0;
  double mean_total_cost = 0.0;
  std::size_t questions = 0;
};

/// Aggregates every metric over the prediction runs. Each prediction qid must
/// have a gold record and appear at most once. R@K is computed for the even
/// members of k_list, PathR@K and AR@K for all members.
inline MetricReport evaluate_run(const std::vector<GoldRecord>& gold,
                                 const std::vector<RetrievalRun>& runs, const Corpus& corpus,
                                 const std::vector<std::size_t>& k_list) {
  std::unordered_map<std::string, const GoldRecord*> by_qid;
  for (const auto& g : gold) {
    g.validate();
    by_qid[g.qid] = &g;
  }

  MetricReport rep;
  rep.questions = runs.size();
  std::unordered_map<std::string, bool> seen;
  for (const auto& run : runs) {
    auto it = by_qid.find(run.qid);
    if (it == by_qid.end()) throw std::runtime_error("prediction qid has no gold record: " + run.qid);
    if (seen[run.qid]) throw std::runtime_error("duplicate prediction qid: " + run.qid);
    seen[run.qid] = true;
    const GoldRecord& g = *it->second;

    for (std::size_t k : k_list) {
      if (k % 2 == 0) rep.r_at[k] += recall_at_k(g, run, k);
      rep.pathr_at[k] += path_recall_at_k(g, run, k);
      if (!g.answer.empty()) rep.ar_at[k] += answer_recall_at_k(g, run, corpus, k);
    }
    auto [em, f1] = support_em_f1(
        g, run.ranked_paths.empty() ? std::vector<std::string>{} : run.ranked_paths[0].docs);
    rep.support_em += em;
    rep.support_f1 += f1;
    rep.mean_encoder_calls += static_cast<double>(run.encoder_calls);
    rep.mean_reranker_inputs += static_cast<double>(run.reranker_inputs);
    rep.mean_total_cost += static_cast<double>(run.total_cost());
  }

  if (rep.questions > 0) {
    auto n = static_cast<double>(rep.questions);
    for (auto& [k, v] : rep.r_at) v /= n;
    for (auto& [k, v] : rep.pathr_at) v /= n;
    for (auto& [k, v] : rep.ar_at) v /= n;
    rep.support_em /= n;
    rep.support_f1 /= n;
    rep.mean_encoder_calls /= n;
    rep.mean_reranker_inputs /= n;
    rep.mean_total_cost /= n;
  }
  return rep;
}

inline nlohmann::ordered_json metric_report_json(const MetricReport& rep) {
  nlohmann::ordered_json j;
  j["questions"] = rep.questions;
  auto emit = [](const std::map<std::size_t, double>& m, std::string_view prefix,
                 nlohmann::ordered_json& out) {
    for (const auto& [k, v] : m) out[std::string(prefix) + "@" + std::to_string(k)] = v;
  };
  nlohmann::ordered_json metrics;
  emit(rep.pathr_at, "PathR", metrics);
  emit(rep.r_at, "R", metrics);
  emit(rep.ar_at, "AR", metrics);
  metrics["support_EM"] = rep.support_em;
  metrics["support_F1"] = rep.support_f1;
  j["metrics"] = std::move(metrics);
  nlohmann::ordered_json cost;
  cost["mean_encoder_calls"] = rep.mean_encoder_calls;
  cost["mean_reranker_inputs"] = rep.mean_reranker_inputs;
  cost["mean_total_cost"] = rep.mean_total_cost;
  j["cost"] = std::move(cost);
  return j;
}

/// Plot-ready K sweep: one row per K with every rate defined at that K.
inline void write_metric_csv(const MetricReport& rep, std::ostream& os) {
  os << "k,path_r,r,ar\n";
  std::set<std::size_t> ks;
  for (const auto& [k, v] : rep.pathr_at) ks.insert(k);
  for (const auto& [k, v] : rep.r_at) ks.insert(k);
  char buf[160];
  for (std::size_t k : ks) {
    auto get = [&](const std::map<std::size_t, double>& m) {
      auto it = m.find(k);
      return it == m.end() ? std::string("") : [&] {
        char b[48];
        std::snprintf(b, sizeof b, "%.6f", it->second);
        return std::string(b);
      }();
    };
    std::snprintf(buf, sizeof buf, "%zu,%s,%s,%s\n", k, get(rep.pathr_at).c_str(),
                  get(rep.r_at).c_str(), get(rep.ar_at).c_str());
    os << buf;
  }
}

// ---- Gold file -----------------------------------------------------------------

inline void write_gold_line(const GoldRecord& g, std::ostream& os) {
  nlohmann::ordered_json j;
  j["qid"] = g.qid;
  j["support"] = std::vector<std::string>(g.support.begin(), g.support.end());
  j["answer"] = g.answer;
  os << j.dump() << '\n';
}

inline std::vector<GoldRecord> read_gold(std::istream& is) {
  std::vector<GoldRecord> out;
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
      throw std::runtime_error("gold line " + std::to_string(line_no) + ": " + e.what());
    }
    GoldRecord g;
    g.qid = j.at("qid").get<std::string>();
    for (const auto& d : j.at("support")) g.support.insert(d.get<std::string>());
    g.answer = j.value("answer", "");
    g.validate();
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<GoldRecord> read_gold_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open gold file: " + path);
  return read_gold(is);
}

}  // namespace hopforge
