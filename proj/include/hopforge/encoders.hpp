#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hopforge/bytes.hpp"
#include "hopforge/corpus.hpp"
#include "hopforge/rng.hpp"
#include "hopforge/text.hpp"

namespace hopforge {

/// Seed folded into the token hash. A fixed, documented constant: featurize
/// must agree across every process that ever touches the same params file.
inline constexpr std::uint64_t kFeatureHashSeed = 0x484f50464f524745ull;

/// Separator spliced between the question and each previously retrieved
/// document when forming a hop-k query.
inline constexpr std::string_view kQueryDocSeparator = " [SEP] ";

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Sparse nonnegative feature vector; entries sorted by bucket.
struct SparseVec {
  std::vector<std::pair<std::uint32_t, double>> entries;
};

/// Hashed bag-of-tokens features, L2-normalized. Empty text maps to the zero
/// vector.
inline SparseVec featurize(std::string_view textv, std::uint32_t hash_buckets) {
  if (hash_buckets < 1) throw std::invalid_argument("hash_buckets must be >= 1");
  std::map<std::uint32_t, double> counts;
  for (const auto& tok : text::tokenize(textv)) {
    auto bucket = static_cast<std::uint32_t>(text::token_hash(tok, kFeatureHashSeed) % hash_buckets);
    counts[bucket] += 1.0;
  }
  SparseVec v;
  v.entries.assign(counts.begin(), counts.end());
  double sq = 0.0;
  for (const auto& [b, w] : v.entries) sq += w * w;
  if (sq > 0.0) {
    double inv = 1.0 / std::sqrt(sq);
    for (auto& [b, w] : v.entries) w *= inv;
  }
  return v;
}

struct EncoderParams {
  std::uint32_t dim = 0;
  std::uint32_t hash_buckets = 0;
  std::uint64_t rng_seed = 0;
  bool shared_projection = false;  // default is the two-encoder design
  std::uint32_t truncate_sentences = 0;  // 0 = feed all sentences to the document side
  Matrix query_proj;  // dim x hash_buckets
  Matrix doc_proj;    // empty when shared

  const Matrix& doc_side() const { return shared_projection ? query_proj : doc_proj; }
  Matrix& doc_side() { return shared_projection ? query_proj : doc_proj; }

  void validate() const {
    if (dim < 2) throw std::invalid_argument("dim must be >= 2");
    if (hash_buckets < dim) throw std::invalid_argument("hash_buckets must be >= dim");
    auto check = [&](const Matrix& m) {
      if (m.rows != dim || m.cols != hash_buckets)
        throw std::invalid_argument("projection shape does not match dim x hash_buckets");
      for (double x : m.data)
        if (!std::isfinite(x)) throw std::invalid_argument("projection has non-finite entries");
    };
    check(query_proj);
    if (!shared_projection) check(doc_proj);
  }
};

namespace detail {

inline Matrix random_projection(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  Rng rng(seed);
  // Glorot-style uniform scale; sqrt of an exact integer double is exactly
  // rounded, so initialization is bit-stable across platforms
  double scale = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& x : m.data) x = rng.uniform_signed(scale);
  return m;
}

}  // namespace detail

inline EncoderParams init_encoder_params(std::uint32_t dim, std::uint32_t hash_buckets,
                                         std::uint64_t seed, bool shared = false) {
  EncoderParams p;
  p.dim = dim;
  p.hash_buckets = hash_buckets;
  p.rng_seed = seed;
  p.shared_projection = shared;
  p.query_proj = detail::random_projection(dim, hash_buckets, derive_seed(seed, 0x51));
  if (!shared) p.doc_proj = detail::random_projection(dim, hash_buckets, derive_seed(seed, 0xd0));
  p.validate();
  return p;
}

/// projection * sparse features; buckets accumulate in ascending order so the
/// result is bitwise reproducible.
inline std::vector<double> project(const Matrix& m, const SparseVec& v) {
  std::vector<double> out(m.rows, 0.0);
  for (const auto& [bucket, weight] : v.entries) {
    if (bucket >= m.cols) throw std::invalid_argument("feature bucket exceeds projection width");
    for (std::size_t r = 0; r < m.rows; ++r) out[r] += m.data[r * m.cols + bucket] * weight;
  }
  return out;
}

inline std::string document_input_text(const EncoderParams& p, const Document& d) {
  if (p.truncate_sentences == 0 || d.sentences.size() <= p.truncate_sentences)
    return document_text(d);
  Document head = d;
  head.sentences.resize(p.truncate_sentences);
  return document_text(head);
}

inline std::vector<double> encode_document(const EncoderParams& p, const Document& d) {
  return project(p.doc_side(), featurize(document_input_text(p, d), p.hash_buckets));
}

/// Query-side text for hop k: the question followed by the previously
/// retrieved documents in retrieval order.
inline std::string query_input_text(const EncoderParams& p, std::string_view question,
                                    const std::vector<const Document*>& prev_docs) {
  std::string textv(question);
  for (const Document* d : prev_docs) {
    textv.append(kQueryDocSeparator);
    textv.append(document_input_text(p, *d));
  }
  return textv;
}

inline std::vector<double> encode_query(const EncoderParams& p, std::string_view question,
                                        const std::vector<const Document*>& prev_docs = {}) {
  return project(p.query_proj, featurize(query_input_text(p, question, prev_docs), p.hash_buckets));
}

/// Raw inner product, the score MIPS maximizes. No normalization.
inline double similarity(const std::vector<double>& qv, const std::vector<double>& dv) {
  if (qv.size() != dv.size()) throw std::invalid_argument("similarity: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < qv.size(); ++i) s += qv[i] * dv[i];
  return s;
}

// ---- Binary params format ----------------------------------------------------
// "HFPM" | u32 version | u32 dim | u32 hash_buckets | u64 seed | u8 shared |
// u32 truncate_sentences | query projection (row-major f32) | doc projection
// (only when not shared). Little-endian throughout.

inline constexpr std::string_view kParamsMagic = "HFPM";
inline constexpr std::uint32_t kParamsVersion = 1;

inline void save_params(const EncoderParams& p, std::ostream& os) {
  os.write(kParamsMagic.data(), 4);
  bytes::write_u32(os, kParamsVersion);
  bytes::write_u32(os, p.dim);
  bytes::write_u32(os, p.hash_buckets);
  bytes::write_u64(os, p.rng_seed);
  bytes::write_u8(os, p.shared_projection ? 1 : 0);
  bytes::write_u32(os, p.truncate_sentences);
  auto write_matrix = [&](const Matrix& m) {
    for (double x : m.data) bytes::write_f32(os, static_cast<float>(x));
  };
  write_matrix(p.query_proj);
  if (!p.shared_projection) write_matrix(p.doc_proj);
}

inline EncoderParams load_params(std::istream& is) {
  bytes::expect_magic(is, kParamsMagic);
  if (bytes::read_u32(is) != kParamsVersion) throw std::runtime_error("unsupported params version");
  EncoderParams p;
  p.dim = bytes::read_u32(is);
  p.hash_buckets = bytes::read_u32(is);
  p.rng_seed = bytes::read_u64(is);
  p.shared_projection = bytes::read_u8(is) != 0;
  p.truncate_sentences = bytes::read_u32(is);
  auto read_matrix = [&]() {
    Matrix m(p.dim, p.hash_buckets);
    for (double& x : m.data) x = static_cast<double>(bytes::read_f32(is));
    return m;
  };
  p.query_proj = read_matrix();
  if (!p.shared_projection) p.doc_proj = read_matrix();
  p.validate();
  return p;
}

inline void save_params_file(const EncoderParams& p, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write params file: " + path);
  save_params(p, os);
}

inline EncoderParams load_params_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open params file: " + path);
  return load_params(is);
}

// ---- Plain embedding dump ------------------------------------------------------
// u32 dim | u64 count | row-major f32. A debugging artifact, not an index.

inline void save_vectors(const std::vector<std::vector<double>>& rows, std::uint32_t dim,
                         std::ostream& os) {
  bytes::write_u32(os, dim);
  bytes::write_u64(os, rows.size());
  for (const auto& r : rows) {
    if (r.size() != dim) throw std::invalid_argument("vector dump: row has wrong dimension");
    for (double x : r) bytes::write_f32(os, static_cast<float>(x));
  }
}

inline std::vector<std::vector<double>> load_vectors(std::istream& is, std::uint32_t* dim_out = nullptr) {
  std::uint32_t dim = bytes::read_u32(is);
  std::uint64_t count = bytes::read_u64(is);
  std::vector<std::vector<double>> rows(count, std::vector<double>(dim));
  for (auto& r : rows)
    for (double& x : r) x = static_cast<double>(bytes::read_f32(is));
  if (dim_out) *dim_out = dim;
  return rows;
}

}  // namespace hopforge
