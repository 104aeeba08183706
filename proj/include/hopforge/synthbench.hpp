#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "hopforge/corpus.hpp"
#include "hopforge/evaluation.hpp"
#include "hopforge/rng.hpp"

// Deterministic benchmark corpus with planted 2-hop chains.
//
// Per chain c the generator plants a source document A and a bridge document
// B such that the generation pipeline provably emits one triple with chain
// [B, A]: A's first sentence carries exactly one resolved hyperlink (the
// bridge mention, pointing at B's title) and exactly one answer candidate (a
// capitalized token that is also a dangling hyperlink mention, so both answer
// policies agree on it). B's first line starts with its own title, which the
// re-phrasing step must delete. B links back to A so outgoing-only hyperlink
// expansion can traverse the chain from either end.
//
// Content tokens are drawn from one shared vocabulary, so chains overlap
// lexically and an encoder trained on some chains transfers to the rest.
// Each bridge gets unlinked "twin" documents that repeat most of its
// first-line tokens with doubled term frequency: they crowd the top of raw
// tf-idf rankings but carry no hyperlinks, so path-level retrieval can beat
// the paired sparse baseline and hyperlink-constrained search prunes them.

namespace hopforge {

struct SynthConfig {
  std::size_t n_docs = 500;
  std::size_t n_chains = 125;
  std::size_t vocab_size = 100;
  std::size_t tokens_per_sentence = 12;
  std::uint64_t rng_seed = 7;

  void validate() const {
    if (n_chains * 2 > n_docs)
      throw std::invalid_argument("infeasible config: need at least 2 documents per chain");
    if (vocab_size < 50) throw std::invalid_argument("vocab_size must be >= 50");
    if (tokens_per_sentence < 6) throw std::invalid_argument("tokens_per_sentence must be >= 6");
  }
};

struct SynthOutput {
  std::vector<Document> documents;
  std::vector<GoldRecord> gold;
};

namespace detail {

inline std::string synth_doc_id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "d%05zu", i);
  return buf;
}

inline std::string vocab_token(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "w%03zu", i);
  return buf;
}

inline std::vector<std::string> draw_distinct_tokens(Rng& rng, std::size_t vocab, std::size_t n) {
  std::unordered_set<std::size_t> used;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::size_t t = rng.uniform_below(vocab);
    if (used.insert(t).second) out.push_back(vocab_token(t));
  }
  return out;
}

inline std::string join_tokens(const std::vector<std::string>& toks, std::size_t begin,
                               std::size_t end) {
  std::string s;
  for (std::size_t i = begin; i < end && i < toks.size(); ++i) {
    if (!s.empty()) s.push_back(' ');
    s.append(toks[i]);
  }
  return s;
}

inline Hyperlink make_link(const std::string& sentence, std::size_t sentence_idx,
                           const std::string& mention, const std::string& target_title) {
  std::size_t pos = sentence.find(mention);
  if (pos == std::string::npos) throw std::logic_error("synthbench mention not in sentence");
  Hyperlink h;
  h.mention = mention;
  h.sentence_idx = sentence_idx;
  h.char_start = pos;  // sentences are ASCII, so bytes equal scalars
  h.char_end = pos + mention.size();
  h.target_title = target_title;
  return h;
}

}  // namespace detail

inline SynthOutput generate_synthetic(const SynthConfig& config) {
  config.validate();
  Rng rng(config.rng_seed);
  const std::size_t n_topic = std::max<std::size_t>(3, config.tokens_per_sentence / 2);

  SynthOutput out;
  out.documents.reserve(config.n_docs);

  struct ChainPlan {
    std::vector<std::string> bridge_tokens;
    std::vector<std::string> source_tokens;
  };
  std::vector<ChainPlan> plans(config.n_chains);

  for (std::size_t c = 0; c < config.n_chains; ++c) {
    auto toks = detail::draw_distinct_tokens(rng, config.vocab_size, 2 * n_topic);
    plans[c].bridge_tokens.assign(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(n_topic));
    plans[c].source_tokens.assign(toks.begin() + static_cast<std::ptrdiff_t>(n_topic), toks.end());

    std::string a_id = detail::synth_doc_id(2 * c);
    std::string b_id = detail::synth_doc_id(2 * c + 1);
    std::string a_title = "Srcdoc" + std::to_string(c) + " Report";
    std::string b_title = "Brgdoc" + std::to_string(c) + " Entry";
    // structural tokens are shared across chains: per-chain unique tokens
    // would hand a bag-of-words encoder a document-identity feature, and the
    // benchmark is about content matching, not id memorization
    std::string answer = "Prize";
    std::string bridge_mention = "relay beacon";
    std::string back_mention = "return channel";

    Document a;
    a.id = a_id;
    a.title = a_title;
    std::string a_s0 = "the " + answer + " outcome follows " + bridge_mention + " across " +
                       detail::join_tokens(plans[c].source_tokens, 0, n_topic);
    std::string a_s1 =
        "the report also covers " + detail::join_tokens(plans[c].source_tokens, 0, n_topic) +
        " in detail";
    a.sentences = {a_s0, a_s1};
    a.links.push_back(detail::make_link(a_s0, 0, bridge_mention, b_title));
    a.links.push_back(detail::make_link(a_s0, 0, answer, "Prizedoc Missing"));

    Document b;
    b.id = b_id;
    b.title = b_title;
    std::string b_s0 = b_title + " presents " +
                       detail::join_tokens(plans[c].bridge_tokens, 0, n_topic) + " for study";
    std::string b_s1 = "the entry catalogs " + back_mention + " beside " +
                       detail::join_tokens(plans[c].bridge_tokens, 0, 2);
    b.sentences = {b_s0, b_s1};
    b.links.push_back(detail::make_link(b_s1, 1, back_mention, a_title));

    out.documents.push_back(std::move(a));
    out.documents.push_back(std::move(b));

    GoldRecord g;
    g.qid = a_id + "#0";
    g.support = {a_id, b_id};
    g.answer = answer;
    out.gold.push_back(std::move(g));
  }

  const std::size_t n_extra = config.n_docs - 2 * config.n_chains;
  const std::size_t n_twins = config.n_chains == 0 ? 0 : std::min(n_extra, 2 * config.n_chains);
  for (std::size_t i = 0; i < n_extra; ++i) {
    Document d;
    d.id = detail::synth_doc_id(2 * config.n_chains + i);
    if (i < n_twins) {
      std::size_t c = i % config.n_chains;
      std::size_t j = i / config.n_chains;
      d.title = "Twindoc" + std::to_string(c) + "x" + std::to_string(j) + " Note";
      const auto& bt = plans[c].bridge_tokens;
      std::size_t share = std::max<std::size_t>(2, (2 * n_topic) / 3);
      std::string s0 = "the note lists";
      for (std::size_t t = 0; t < share && t < bt.size(); ++t) {
        std::size_t idx = (t + j) % bt.size();  // twins overlap different token subsets
        s0 += " " + bt[idx] + " " + bt[idx];
      }
      auto noise = detail::draw_distinct_tokens(rng, config.vocab_size, 2);
      s0 += " plus " + noise[0] + " " + noise[1];
      std::string s1 = "the note adds " + noise[0] + " " + noise[1] + " greatly";
      d.sentences = {s0, s1};
    } else {
      d.title = "Fardoc" + std::to_string(i) + " Misc";
      auto toks = detail::draw_distinct_tokens(rng, config.vocab_size, 6);
      std::string s0 = "the misc file holds " + detail::join_tokens(toks, 0, 4) + " items";
      std::string s1 = "the file adds " + detail::join_tokens(toks, 4, 6) + " quietly";
      d.sentences = {s0, s1};
    }
    out.documents.push_back(std::move(d));
  }

  return out;
}

/// Writes the corpus and gold files (same formats as ingest/evaluate use).
inline void write_synthetic(const SynthConfig& config, const std::string& corpus_path,
                            const std::string& gold_path) {
  auto out = generate_synthetic(config);
  Corpus corpus(std::move(out.documents));
  serialize_corpus_file(corpus, corpus_path);
  std::ofstream gold(gold_path, std::ios::binary);
  if (!gold) throw std::runtime_error("cannot write gold file: " + gold_path);
  for (const auto& g : out.gold) write_gold_line(g, gold);
}

}  // namespace hopforge
