#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hopforge/corpus.hpp"
#include "hopforge/rng.hpp"
#include "hopforge/text.hpp"

// Pseudo question / reasoning chain / answer generation. A hyperlinked
// mention is treated as the bridge entity between two documents: the mention
// is re-phrased with the first line of the document it points to (bridge
// title deleted so the question cannot give the bridge document away), then
// one surviving entity is masked with "what" to form the question/answer
// pair. The resulting chain is [bridge document, source document].

namespace hopforge {

enum class AnswerPolicy {
  kHyperlinkMentions,  // candidate answers are hyperlink mention strings
  kCapitalizedSpans,   // candidate answers are maximal runs of capitalized tokens
};

inline std::string_view to_string(AnswerPolicy p) {
  return p == AnswerPolicy::kHyperlinkMentions ? "hyperlink_mentions" : "capitalized_spans";
}

inline AnswerPolicy answer_policy_from_string(std::string_view s) {
  if (s == "hyperlink_mentions") return AnswerPolicy::kHyperlinkMentions;
  if (s == "capitalized_spans") return AnswerPolicy::kCapitalizedSpans;
  throw std::invalid_argument("unknown answer policy: " + std::string(s));
}

struct GenerationConfig {
  std::uint64_t rng_seed = 0;
  std::uint32_t max_triples_per_doc = 2;
  std::uint32_t min_sentence_tokens = 5;
  AnswerPolicy answer_entity_policy = AnswerPolicy::kHyperlinkMentions;

  void validate() const {
    if (max_triples_per_doc < 1) throw std::invalid_argument("max_triples_per_doc must be >= 1");
    if (min_sentence_tokens < 3) throw std::invalid_argument("min_sentence_tokens must be >= 3");
  }
};

struct TrainingTriple {
  std::string qid;
  std::string question;
  std::vector<std::string> chain;  // [bridge_doc, source_doc]
  std::string answer;
  std::string bridge_mention;
  std::size_t source_sentence_idx = 0;
  std::size_t mask_begin = std::string::npos;  // byte offset of "what" in question
};

struct BridgeCandidate {
  std::size_t sentence_idx;
  Hyperlink link;
  std::string bridge_doc_id;
};

struct RephraseResult {
  std::string merged;
  std::size_t splice_begin;  // byte span of the spliced bridge text in merged
  std::size_t splice_end;
};

struct AnswerSpan {
  std::size_t begin;
  std::size_t end;
  std::string textv;
};

struct GenerationReport {
  std::size_t candidates = 0;
  std::size_t emitted = 0;
  std::size_t docs_without_candidates = 0;
  std::map<std::string, std::size_t> skipped;  // reason -> count; sums with
                                               // emitted to candidates

  std::size_t total_skipped() const {
    std::size_t n = 0;
    for (const auto& [k, v] : skipped) n += v;
    return n;
  }
};

/// One candidate per resolved, non-self hyperlink whose sentence has at least
/// min_sentence_tokens whitespace tokens, in document order.
inline std::vector<BridgeCandidate> select_bridge_candidates(const Corpus& corpus,
                                                             std::string_view doc_id,
                                                             std::uint32_t min_sentence_tokens) {
  const Document& d = corpus.doc(doc_id);
  std::vector<BridgeCandidate> out;
  for (const auto& rl : corpus.outgoing_links(doc_id)) {
    if (text::ws_token_count(d.sentences[rl.link.sentence_idx]) < min_sentence_tokens) continue;
    out.push_back({rl.link.sentence_idx, rl.link, rl.target_id});
  }
  return out;
}

/// Splices the bridge document's first line (every occurrence of the bridge
/// title deleted, whitespace collapsed) over the mention span. Offsets are
/// Unicode scalars. Returns nullopt when title deletion empties the line.
inline std::optional<RephraseResult> rephrase_bridge_entity(std::string_view source_sentence,
                                                            std::size_t char_start,
                                                            std::size_t char_end,
                                                            const Document& bridge_doc) {
  if (bridge_doc.sentences.empty())
    throw std::invalid_argument("bridge document has no sentences");
  std::size_t b0 = text::utf8_byte_of_scalar(source_sentence, char_start);
  std::size_t b1 = text::utf8_byte_of_scalar(source_sentence, char_end);
  if (char_start >= char_end || b0 == std::string_view::npos || b1 == std::string_view::npos)
    throw std::invalid_argument("mention span invalid in source sentence");

  std::string cleaned =
      text::collapse_ws(text::remove_all_ci(bridge_doc.sentences[0], bridge_doc.title));
  if (cleaned.empty()) return std::nullopt;

  std::string raw;
  raw.reserve(source_sentence.size() + cleaned.size());
  raw.append(source_sentence.substr(0, b0));
  raw.append(cleaned);
  raw.append(source_sentence.substr(b1));

  auto mapped = text::collapse_ws_mapped(raw, b0, b0 + cleaned.size());
  return RephraseResult{std::move(mapped.text), mapped.begin, mapped.end};
}

/// Picks the answer span uniformly among the policy's candidates, never
/// overlapping the spliced bridge region. mention_candidates feeds the
/// hyperlink policy and is ignored by the capitalized-tokens policy.
inline std::optional<AnswerSpan> select_answer_entity(std::string_view merged,
                                                      std::size_t splice_begin,
                                                      std::size_t splice_end,
                                                      const std::vector<std::string>& mention_candidates,
                                                      AnswerPolicy policy, Rng& rng) {
  if (merged.empty()) return std::nullopt;
  auto overlaps_splice = [&](std::size_t b, std::size_t e) {
    return b < splice_end && splice_begin < e;
  };

  std::vector<std::pair<std::size_t, std::size_t>> spans;
  if (policy == AnswerPolicy::kHyperlinkMentions) {
    std::vector<std::string> distinct;
    for (const auto& m : mention_candidates)
      if (!m.empty() && std::find(distinct.begin(), distinct.end(), m) == distinct.end())
        distinct.push_back(m);
    for (const auto& m : distinct) {
      std::size_t from = 0;
      while (true) {
        std::size_t hit = merged.find(m, from);
        if (hit == std::string_view::npos) break;
        if (!overlaps_splice(hit, hit + m.size())) spans.emplace_back(hit, hit + m.size());
        from = hit + m.size();
      }
    }
  } else {
    auto tokens = text::ws_token_spans(merged);
    auto is_cap = [&](std::size_t t) {
      char c = merged[tokens[t].first];
      return c >= 'A' && c <= 'Z';
    };
    std::size_t t = 0;
    while (t < tokens.size()) {
      if (!is_cap(t)) {
        ++t;
        continue;
      }
      std::size_t run_end = t;
      while (run_end + 1 < tokens.size() && is_cap(run_end + 1)) ++run_end;
      std::size_t b = tokens[t].first, e = tokens[run_end].second;
      if (!overlaps_splice(b, e)) spans.emplace_back(b, e);
      t = run_end + 1;
    }
  }

  std::sort(spans.begin(), spans.end());
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  if (spans.empty()) return std::nullopt;

  auto [b, e] = spans[rng.uniform_below(spans.size())];
  return AnswerSpan{b, e, std::string(merged.substr(b, e - b))};
}

struct PseudoQuestion {
  std::string question;
  std::string answer;
  std::size_t mask_begin;
};

/// Masks the answer span with the literal token "what".
inline PseudoQuestion make_pseudo_question(std::string_view merged, const AnswerSpan& span) {
  if (span.begin > span.end || span.end > merged.size())
    throw std::invalid_argument("answer span invalid in merged sentence");
  PseudoQuestion out;
  out.question.reserve(merged.size());
  out.question.append(merged.substr(0, span.begin));
  out.mask_begin = out.question.size();
  out.question.append("what");
  out.question.append(merged.substr(span.end));
  out.answer = std::string(merged.substr(span.begin, span.end - span.begin));
  return out;
}

namespace detail {

inline std::uint64_t doc_stream_seed(std::uint64_t seed, std::string_view doc_id) {
  return derive_seed(seed, bytes::fnv1a64(doc_id));
}

}  // namespace detail

/// Runs the full pipeline over one document. Pure function of
/// (document, corpus, config), so documents may be processed in any order or
/// in parallel as long as output is serialized in id order.
inline std::vector<TrainingTriple> generate_for_document(const Corpus& corpus, const Document& doc,
                                                         const GenerationConfig& config,
                                                         GenerationReport& report) {
  std::vector<TrainingTriple> out;
  Rng rng(detail::doc_stream_seed(config.rng_seed, doc.id));
  auto candidates = select_bridge_candidates(corpus, doc.id, config.min_sentence_tokens);
  report.candidates += candidates.size();
  if (candidates.empty()) report.docs_without_candidates++;

  for (const auto& cand : candidates) {
    if (out.size() >= config.max_triples_per_doc) {
      report.skipped["per_doc_cap"]++;
      continue;
    }
    const Document& bridge = corpus.doc(cand.bridge_doc_id);
    auto rephrased = rephrase_bridge_entity(doc.sentences[cand.sentence_idx], cand.link.char_start,
                                            cand.link.char_end, bridge);
    if (!rephrased) {
      report.skipped["empty_first_line"]++;
      continue;
    }

    // answer candidates: mentions of the sentence's other hyperlinks (the
    // replaced bridge link itself no longer exists in the merged text)
    std::vector<std::string> mentions;
    for (const auto& link : doc.links) {
      if (link.sentence_idx != cand.sentence_idx) continue;
      if (link.char_start == cand.link.char_start && link.char_end == cand.link.char_end) continue;
      mentions.push_back(link.mention);
    }

    auto span = select_answer_entity(rephrased->merged, rephrased->splice_begin,
                                     rephrased->splice_end, mentions,
                                     config.answer_entity_policy, rng);
    if (!span) {
      report.skipped["no_answer_candidate"]++;
      continue;
    }

    auto pq = make_pseudo_question(rephrased->merged, *span);
    if (text::contains_ci(pq.question, bridge.title)) {
      report.skipped["bridge_title_leak"]++;
      continue;
    }
    if (text::count_word(pq.question, "what") != 1) {
      report.skipped["placeholder_collision"]++;
      continue;
    }

    TrainingTriple t;
    t.qid = doc.id + "#" + std::to_string(out.size());
    t.question = std::move(pq.question);
    t.chain = {cand.bridge_doc_id, doc.id};
    t.answer = std::move(pq.answer);
    t.bridge_mention = cand.link.mention;
    t.source_sentence_idx = cand.sentence_idx;
    t.mask_begin = pq.mask_begin;
    report.emitted++;
    out.push_back(std::move(t));
  }
  return out;
}

/// Streams triples for the whole corpus in document id order.
inline GenerationReport generate_dataset(const Corpus& corpus, const GenerationConfig& config,
                                         const std::function<void(const TrainingTriple&)>& sink) {
  config.validate();
  GenerationReport report;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (const auto& t : generate_for_document(corpus, corpus.doc_at(i), config, report)) sink(t);
  return report;
}

/// Output-file invariants, machine-checkable on a parsed triple.
inline std::vector<std::string> triple_violations(const TrainingTriple& t, const Corpus& corpus) {
  std::vector<std::string> bad;
  if (t.chain.size() != 2)
    bad.push_back("chain must have exactly 2 documents");
  else {
    if (t.chain[0] == t.chain[1]) bad.push_back("chain documents must be distinct");
    for (const auto& id : t.chain)
      if (!corpus.has_id(id)) bad.push_back("chain document missing from corpus: " + id);
  }
  if (text::count_word(t.question, "what") != 1)
    bad.push_back("question must contain the placeholder token exactly once");
  if (t.chain.size() == 2 && corpus.has_id(t.chain[0]) &&
      text::contains_ci(t.question, corpus.doc(t.chain[0]).title))
    bad.push_back("bridge title leaked into question");
  return bad;
}

// ---- Triples file ------------------------------------------------------------

inline void write_triple_line(const TrainingTriple& t, std::ostream& os) {
  nlohmann::ordered_json j;
  j["qid"] = t.qid;
  j["question"] = t.question;
  j["answer"] = t.answer;
  j["chain"] = t.chain;
  j["bridge_mention"] = t.bridge_mention;
  j["source_doc"] = t.chain.size() == 2 ? t.chain[1] : "";
  os << j.dump() << '\n';
}

inline std::vector<TrainingTriple> read_triples(std::istream& is) {
  std::vector<TrainingTriple> out;
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
      throw std::runtime_error("triples line " + std::to_string(line_no) + ": " + e.what());
    }
    TrainingTriple t;
    t.qid = j.at("qid").get<std::string>();
    t.question = j.at("question").get<std::string>();
    t.answer = j.at("answer").get<std::string>();
    t.chain = j.at("chain").get<std::vector<std::string>>();
    t.bridge_mention = j.value("bridge_mention", "");
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<TrainingTriple> read_triples_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open triples file: " + path);
  return read_triples(is);
}

inline void write_generation_report(const GenerationReport& r, std::ostream& os) {
  nlohmann::ordered_json j;
  j["candidates"] = r.candidates;
  j["emitted"] = r.emitted;
  j["docs_without_candidates"] = r.docs_without_candidates;
  nlohmann::ordered_json sk;
  for (const auto& [reason, n] : r.skipped) sk[reason] = n;
  j["skipped"] = std::move(sk);
  os << j.dump(2) << '\n';
}

}  // namespace hopforge
