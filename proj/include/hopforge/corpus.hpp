#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hopforge/text.hpp"

namespace hopforge {

struct Hyperlink {
  std::string mention;
  std::size_t sentence_idx = 0;
  std::size_t char_start = 0;  // Unicode scalar offsets into the sentence
  std::size_t char_end = 0;
  std::string target_title;
  bool dangling = false;  // no document carries target_title; kept but flagged
};

struct Document {
  std::string id;
  std::string title;
  std::vector<std::string> sentences;
  std::vector<Hyperlink> links;
};

/// Title + all sentences, the text every encoder and index sees for a document.
inline std::string document_text(const Document& d) {
  std::string out = d.title;
  for (const auto& s : d.sentences) {
    out.push_back(' ');
    out.append(s);
  }
  return out;
}

struct IngestReport {
  std::size_t documents = 0;
  std::size_t links_kept = 0;
  std::size_t links_dangling = 0;
  std::map<std::string, std::size_t> dropped;  // reason -> count (lax mode)

  std::size_t total_dropped() const {
    std::size_t n = 0;
    for (const auto& [k, v] : dropped) n += v;
    return n;
  }
};

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResolvedLink {
  Hyperlink link;
  std::string target_id;
};

/// Immutable hyperlinked document collection. Documents are held in ascending
/// id order; the title index and adjacency are derived from the documents at
/// construction and never change, so concurrent readers need no locking.
class Corpus {
 public:
  Corpus() = default;

  /// Builds from validated documents. Duplicate ids/titles must already be
  /// resolved by the caller (ingest does this).
  explicit Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    std::sort(docs_.begin(), docs_.end(),
              [](const Document& a, const Document& b) { return a.id < b.id; });
    for (std::uint32_t i = 0; i < docs_.size(); ++i) {
      if (!id_index_.emplace(docs_[i].id, i).second)
        throw IngestError("duplicate document id: " + docs_[i].id);
      if (!title_index_.emplace(docs_[i].title, i).second)
        throw IngestError("duplicate document title: " + docs_[i].title);
    }
    adjacency_.resize(docs_.size());
    for (std::uint32_t i = 0; i < docs_.size(); ++i) {
      std::vector<std::uint32_t> out;
      for (auto& link : docs_[i].links) {
        auto it = title_index_.find(link.target_title);
        link.dangling = (it == title_index_.end());
        if (!link.dangling && it->second != i) out.push_back(it->second);
      }
      // self-loops and duplicate edges collapse here; neither can form a
      // 2-document chain
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      adjacency_[i] = std::move(out);
    }
  }

  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

  bool has_id(std::string_view id) const { return id_index_.count(std::string(id)) > 0; }

  const Document& doc(std::string_view id) const { return docs_[index_of(id)]; }
  const Document& doc_at(std::size_t i) const { return docs_[i]; }

  std::uint32_t index_of(std::string_view id) const {
    auto it = id_index_.find(std::string(id));
    if (it == id_index_.end()) throw std::out_of_range("unknown doc id: " + std::string(id));
    return it->second;
  }

  /// All ids, ascending.
  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(docs_.size());
    for (const auto& d : docs_) out.push_back(d.id);
    return out;
  }

  const std::string* id_of_title(std::string_view title) const {
    auto it = title_index_.find(std::string(title));
    return it == title_index_.end() ? nullptr : &docs_[it->second].id;
  }

  /// Ids linked from `id` (resolved, deduplicated, no self-loops), ascending.
  std::vector<std::string> adjacent_ids(std::string_view id) const {
    std::vector<std::string> out;
    for (std::uint32_t j : adjacency_[index_of(id)]) out.push_back(docs_[j].id);
    return out;
  }

  const std::vector<std::uint32_t>& adjacent_indexes(std::uint32_t i) const { return adjacency_[i]; }

  /// Resolved, non-self links in document order (sentence_idx, then char_start).
  std::vector<ResolvedLink> outgoing_links(std::string_view id) const {
    std::uint32_t i = index_of(id);
    std::vector<ResolvedLink> out;
    for (const auto& link : docs_[i].links) {
      if (link.dangling) continue;
      auto it = title_index_.find(link.target_title);
      if (it->second == i) continue;
      out.push_back({link, docs_[it->second].id});
    }
    std::stable_sort(out.begin(), out.end(), [](const ResolvedLink& a, const ResolvedLink& b) {
      if (a.link.sentence_idx != b.link.sentence_idx) return a.link.sentence_idx < b.link.sentence_idx;
      return a.link.char_start < b.link.char_start;
    });
    return out;
  }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::uint32_t> id_index_;
  std::unordered_map<std::string, std::uint32_t> title_index_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
};

namespace detail {

inline Document parse_document_line(const std::string& line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IngestError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
  }
  auto fail = [&](const std::string& what) -> IngestError {
    return IngestError("line " + std::to_string(line_no) + ": " + what);
  };
  if (!j.is_object()) throw fail("record is not an object");
  Document d;
  try {
    d.id = j.at("id").get<std::string>();
    d.title = j.at("title").get<std::string>();
    d.sentences = j.at("sentences").get<std::vector<std::string>>();
    for (const auto& lj : j.value("links", nlohmann::json::array())) {
      Hyperlink h;
      h.mention = lj.at("mention").get<std::string>();
      h.sentence_idx = lj.at("sentence_idx").get<std::size_t>();
      h.char_start = lj.at("char_start").get<std::size_t>();
      h.char_end = lj.at("char_end").get<std::size_t>();
      h.target_title = lj.at("target_title").get<std::string>();
      d.links.push_back(std::move(h));
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed record: ") + e.what());
  }
  if (d.id.empty()) throw fail("empty id");
  if (d.title.empty()) throw fail("empty title");
  return d;
}

}  // namespace detail

/// Reads one JSON document per line, validates invariants, builds the corpus.
/// strict=true aborts on any violation; strict=false drops offending links or
/// documents and counts them in the report.
inline Corpus ingest_corpus(std::istream& in, bool strict, IngestReport* report = nullptr) {
  IngestReport local;
  IngestReport& rep = report ? *report : local;

  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> seen_ids;
  std::unordered_map<std::string, std::size_t> seen_titles;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Document d = detail::parse_document_line(line, line_no);

    auto drop_doc = [&](const std::string& reason) {
      if (strict) throw IngestError("line " + std::to_string(line_no) + ": " + reason);
      rep.dropped[reason]++;
    };

    if (d.sentences.empty()) {
      drop_doc("document has no sentences");
      continue;
    }
    if (seen_ids.count(d.id)) {
      drop_doc("duplicate id");
      continue;
    }
    if (seen_titles.count(d.title)) {
      drop_doc("duplicate title");
      continue;
    }

    std::vector<Hyperlink> kept;
    for (const auto& h : d.links) {
      std::string reason;
      if (h.sentence_idx >= d.sentences.size()) {
        reason = "link sentence_idx out of range";
      } else if (h.char_start >= h.char_end) {
        reason = "link span empty";
      } else {
        auto slice = text::slice_scalars(d.sentences[h.sentence_idx], h.char_start, h.char_end);
        if (!slice)
          reason = "link span outside sentence";
        else if (*slice != h.mention)
          reason = "link mention does not match span";
      }
      if (reason.empty()) {
        kept.push_back(h);
      } else if (strict) {
        throw IngestError("line " + std::to_string(line_no) + ": " + reason);
      } else {
        rep.dropped[reason]++;
      }
    }
    d.links = std::move(kept);

    seen_ids.emplace(d.id, line_no);
    seen_titles.emplace(d.title, line_no);
    docs.push_back(std::move(d));
  }

  Corpus corpus(std::move(docs));
  rep.documents = corpus.size();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (const auto& l : corpus.doc_at(i).links) {
      ++rep.links_kept;
      if (l.dangling) ++rep.links_dangling;
    }
  }
  return corpus;
}

inline Corpus ingest_corpus_file(const std::string& path, bool strict, IngestReport* report = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open corpus file: " + path);
  return ingest_corpus(in, strict, report);
}

/// Canonical JSONL writer; ingest(serialize(c)) reproduces c structurally.
inline void serialize_corpus(const Corpus& corpus, std::ostream& out) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Document& d = corpus.doc_at(i);
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["title"] = d.title;
    j["sentences"] = d.sentences;
    auto links = nlohmann::ordered_json::array();
    for (const auto& h : d.links) {
      nlohmann::ordered_json lj;
      lj["mention"] = h.mention;
      lj["sentence_idx"] = h.sentence_idx;
      lj["char_start"] = h.char_start;
      lj["char_end"] = h.char_end;
      lj["target_title"] = h.target_title;
      links.push_back(std::move(lj));
    }
    j["links"] = std::move(links);
    out << j.dump() << '\n';
  }
}

inline void serialize_corpus_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write corpus file: " + path);
  serialize_corpus(corpus, out);
}

}  // namespace hopforge
