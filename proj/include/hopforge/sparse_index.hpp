#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hopforge/bytes.hpp"
#include "hopforge/corpus.hpp"
#include "hopforge/paths.hpp"
#include "hopforge/text.hpp"

namespace hopforge {

struct SparseHit {
  std::string doc_id;
  double score;
};

/// TF-IDF inverted index over title + sentences. Tokenization matches the
/// feature hasher's (same tokenize()), with the full vocabulary instead of
/// hashed buckets. Immutable after build.
class SparseIndex {
 public:
  SparseIndex() = default;

  static SparseIndex build(const Corpus& corpus) {
    if (corpus.empty()) throw std::invalid_argument("cannot build sparse index over empty corpus");
    SparseIndex idx;
    idx.doc_ids_ = corpus.ids();  // ascending, so postings sort by construction
    idx.doc_lengths_.resize(idx.doc_ids_.size(), 0);
    for (std::uint32_t di = 0; di < idx.doc_ids_.size(); ++di) {
      auto tokens = text::tokenize(document_text(corpus.doc_at(di)));
      idx.doc_lengths_[di] = static_cast<std::uint32_t>(tokens.size());
      std::unordered_map<std::string, std::uint32_t> tf;
      for (const auto& t : tokens) tf[t]++;
      // term ids assigned by first occurrence in (doc order, token order)
      for (const auto& t : tokens) {
        auto [it, inserted] = idx.vocab_.emplace(t, static_cast<std::uint32_t>(idx.terms_.size()));
        if (inserted) {
          idx.terms_.push_back(t);
          idx.postings_.emplace_back();
        }
        auto& plist = idx.postings_[it->second];
        if (plist.empty() || plist.back().first != di) plist.emplace_back(di, tf[t]);
      }
    }
    idx.rebuild_idf();
    return idx;
  }

  std::size_t doc_count() const { return doc_ids_.size(); }
  std::size_t vocab_size() const { return terms_.size(); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }

  bool has_term(std::string_view t) const { return vocab_.count(std::string(t)) > 0; }

  double idf(std::string_view t) const {
    auto it = vocab_.find(std::string(t));
    return it == vocab_.end() ? 0.0 : idf_[it->second];
  }

  const std::vector<std::pair<std::uint32_t, std::uint32_t>>* postings(std::string_view t) const {
    auto it = vocab_.find(std::string(t));
    return it == vocab_.end() ? nullptr : &postings_[it->second];
  }

  /// Ranked tf·idf retrieval. Distinct query terms each contribute
  /// tf(t, d) * idf(t). Queries with no in-vocabulary term return nothing.
  /// With require_keyword_match, only documents sharing at least one query
  /// term survive; without it the whole corpus is ranked (zero scores
  /// included). Ties break by ascending doc id.
  std::vector<SparseHit> retrieve(std::string_view query, std::size_t k,
                                  bool require_keyword_match = true) const {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    auto tokens = text::tokenize(query);
    std::vector<std::uint32_t> term_ids;
    for (const auto& t : tokens) {
      auto it = vocab_.find(t);
      if (it != vocab_.end() &&
          std::find(term_ids.begin(), term_ids.end(), it->second) == term_ids.end())
        term_ids.push_back(it->second);
    }
    if (term_ids.empty()) return {};

    std::vector<double> score(doc_ids_.size(), 0.0);
    std::vector<char> touched(doc_ids_.size(), 0);
    for (std::uint32_t tid : term_ids) {
      for (const auto& [di, tf] : postings_[tid]) {
        score[di] += static_cast<double>(tf) * idf_[tid];
        touched[di] = 1;
      }
    }

    std::vector<std::uint32_t> cand;
    for (std::uint32_t di = 0; di < doc_ids_.size(); ++di)
      if (!require_keyword_match || touched[di]) cand.push_back(di);

    std::sort(cand.begin(), cand.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (score[a] != score[b]) return score[a] > score[b];
      return a < b;
    });
    if (cand.size() > k) cand.resize(k);

    std::vector<SparseHit> hits;
    hits.reserve(cand.size());
    for (std::uint32_t di : cand) hits.push_back({doc_ids_[di], score[di]});
    return hits;
  }

  // ---- Binary format ----------------------------------------------------------
  // "HFSI" | u32 version | u64 doc_count | doc ids (len-prefixed) |
  // u32 doc_lengths | u64 vocab_size | terms (len-prefixed) |
  // postings per term: u64 n, then (u32 doc_idx, u32 tf) pairs.
  // idf is derived, so it is recomputed on load.

  void save(std::ostream& os) const {
    os.write("HFSI", 4);
    bytes::write_u32(os, 1);
    bytes::write_u64(os, doc_ids_.size());
    for (const auto& id : doc_ids_) bytes::write_str(os, id);
    for (auto len : doc_lengths_) bytes::write_u32(os, len);
    bytes::write_u64(os, terms_.size());
    for (const auto& t : terms_) bytes::write_str(os, t);
    for (const auto& plist : postings_) {
      bytes::write_u64(os, plist.size());
      for (const auto& [di, tf] : plist) {
        bytes::write_u32(os, di);
        bytes::write_u32(os, tf);
      }
    }
  }

  static SparseIndex load(std::istream& is) {
    bytes::expect_magic(is, "HFSI");
    if (bytes::read_u32(is) != 1) throw std::runtime_error("unsupported sparse index version");
    SparseIndex idx;
    auto n_docs = bytes::read_u64(is);
    idx.doc_ids_.reserve(n_docs);
    for (std::uint64_t i = 0; i < n_docs; ++i) idx.doc_ids_.push_back(bytes::read_str(is));
    idx.doc_lengths_.resize(n_docs);
    for (auto& len : idx.doc_lengths_) len = bytes::read_u32(is);
    auto n_terms = bytes::read_u64(is);
    idx.terms_.reserve(n_terms);
    for (std::uint64_t t = 0; t < n_terms; ++t) {
      idx.terms_.push_back(bytes::read_str(is));
      idx.vocab_.emplace(idx.terms_.back(), static_cast<std::uint32_t>(t));
    }
    idx.postings_.resize(n_terms);
    for (auto& plist : idx.postings_) {
      auto n = bytes::read_u64(is);
      plist.reserve(n);
      for (std::uint64_t i = 0; i < n; ++i) {
        auto di = bytes::read_u32(is);
        auto tf = bytes::read_u32(is);
        plist.emplace_back(di, tf);
      }
    }
    idx.rebuild_idf();
    return idx;
  }

  void save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write sparse index: " + path);
    save(os);
  }

  static SparseIndex load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open sparse index: " + path);
    return load(is);
  }

 private:
  void rebuild_idf() {
    idf_.resize(terms_.size());
    auto n = static_cast<double>(doc_ids_.size());
    for (std::size_t t = 0; t < terms_.size(); ++t)
      idf_[t] = std::log(n / static_cast<double>(postings_[t].size()));
  }

  std::vector<std::string> doc_ids_;  // ascending
  std::vector<std::uint32_t> doc_lengths_;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t> vocab_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> postings_;
  std::vector<double> idf_;
};

/// TF-IDF baseline path list: consecutive ranked documents pair up,
/// [d1,d2,d3,d4,...] -> [{d1,d2},{d3,d4},...]; an odd tail is dropped.
inline std::vector<ReasoningPath> paired_document_list(const std::vector<SparseHit>& ranked) {
  std::vector<ReasoningPath> out;
  for (std::size_t i = 0; i + 1 < ranked.size(); i += 2) {
    ReasoningPath p;
    p.docs = {ranked[i].doc_id, ranked[i + 1].doc_id};
    p.per_hop_scores = {ranked[i].score, ranked[i + 1].score};
    p.score = ranked[i].score + ranked[i + 1].score;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace hopforge
