#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hopforge/bytes.hpp"
#include "hopforge/corpus.hpp"
#include "hopforge/encoders.hpp"
#include "hopforge/parallel.hpp"

namespace hopforge {

struct MipsHit {
  std::string doc_id;
  double score;
};

struct MipsResult {
  std::vector<MipsHit> hits;
  std::vector<std::string> missing_candidates;  // requested ids not in the index
};

/// Exact maximum inner product search over one embedding row per document.
/// Ids are strictly ascending; scan is blocked for cache behavior but the
/// contract is exact top-k with ties broken by ascending doc id.
class DenseIndex {
 public:
  DenseIndex() = default;

  static DenseIndex build(const Corpus& corpus, const EncoderParams& params, unsigned threads = 1) {
    if (corpus.empty()) throw std::invalid_argument("cannot build dense index over empty corpus");
    params.validate();
    DenseIndex idx;
    idx.dim_ = params.dim;
    idx.ids_ = corpus.ids();
    idx.matrix_.assign(idx.ids_.size() * idx.dim_, 0.0);
    parallel_chunks(idx.ids_.size(), threads, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) {
        auto v = encode_document(params, corpus.doc_at(i));
        std::copy(v.begin(), v.end(), idx.matrix_.begin() + static_cast<std::ptrdiff_t>(i * idx.dim_));
      }
    });
    idx.rebuild_lookup();
    return idx;
  }

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& matrix() const { return matrix_; }

  bool has_id(std::string_view id) const { return lookup_.count(std::string(id)) > 0; }

  std::vector<double> row(std::string_view id) const {
    auto it = lookup_.find(std::string(id));
    if (it == lookup_.end()) throw std::out_of_range("dense index: unknown id " + std::string(id));
    auto b = matrix_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_);
    return {b, b + dim_};
  }

  /// Exact top-k by inner product, optionally restricted to candidate_ids.
  /// Candidates missing from the index are reported and skipped.
  MipsResult search(const std::vector<double>& query, std::size_t k,
                    const std::optional<std::vector<std::string>>& candidate_ids = std::nullopt,
                    unsigned threads = 1) const {
    if (query.size() != dim_) throw std::invalid_argument("mips: query dimension mismatch");
    if (k < 1) throw std::invalid_argument("mips: k must be >= 1");

    MipsResult result;
    std::vector<std::uint32_t> rows;
    if (candidate_ids) {
      std::unordered_set<std::uint32_t> seen;
      for (const auto& id : *candidate_ids) {
        auto it = lookup_.find(id);
        if (it == lookup_.end())
          result.missing_candidates.push_back(id);
        else if (seen.insert(it->second).second)
          rows.push_back(it->second);
      }
      std::sort(rows.begin(), rows.end());
      if (rows.empty()) return result;
    }

    const std::size_t n = candidate_ids ? rows.size() : ids_.size();
    auto row_of = [&](std::size_t i) { return candidate_ids ? rows[i] : static_cast<std::uint32_t>(i); };

    struct Scored {
      double score;
      std::uint32_t row;
    };
    auto better = [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.row < b.row;
    };

    // each chunk keeps its own top-k over a blocked scan; merging in chunk
    // order with the same comparator reproduces the sequential result
    unsigned n_chunks = threads <= 1 ? 1 : threads;
    std::vector<std::vector<Scored>> chunk_tops(std::max<std::size_t>(1, std::min<std::size_t>(n_chunks, n)));
    parallel_chunks(n, n_chunks, [&](std::size_t b, std::size_t e, std::size_t chunk) {
      std::vector<Scored>& top = chunk_tops[chunk];
      constexpr std::size_t kBlock = 256;
      for (std::size_t blk = b; blk < e; blk += kBlock) {
        std::size_t blk_end = std::min(e, blk + kBlock);
        for (std::size_t i = blk; i < blk_end; ++i) {
          std::uint32_t r = row_of(i);
          const double* base = matrix_.data() + static_cast<std::size_t>(r) * dim_;
          double s = 0.0;
          for (std::uint32_t d = 0; d < dim_; ++d) s += base[d] * query[d];
          top.push_back({s, r});
        }
        if (top.size() > 4 * k + 64) shrink(top, k, better);
      }
      shrink(top, k, better);
    });

    std::vector<Scored> merged;
    for (auto& t : chunk_tops) merged.insert(merged.end(), t.begin(), t.end());
    shrink(merged, k, better);

    result.hits.reserve(merged.size());
    for (const auto& s : merged) result.hits.push_back({ids_[s.row], s.score});
    return result;
  }

  // ---- Binary format ----------------------------------------------------------
  // "HFDI" | u32 version | u32 dim | u64 count | ids (len-prefixed) |
  // row-major f32 rows.

  void save(std::ostream& os) const {
    os.write("HFDI", 4);
    bytes::write_u32(os, 1);
    bytes::write_u32(os, dim_);
    bytes::write_u64(os, ids_.size());
    for (const auto& id : ids_) bytes::write_str(os, id);
    for (double x : matrix_) bytes::write_f32(os, static_cast<float>(x));
  }

  static DenseIndex load(std::istream& is) {
    bytes::expect_magic(is, "HFDI");
    if (bytes::read_u32(is) != 1) throw std::runtime_error("unsupported dense index version");
    DenseIndex idx;
    idx.dim_ = bytes::read_u32(is);
    auto count = bytes::read_u64(is);
    idx.ids_.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) idx.ids_.push_back(bytes::read_str(is));
    idx.matrix_.resize(count * idx.dim_);
    for (double& x : idx.matrix_) x = static_cast<double>(bytes::read_f32(is));
    idx.rebuild_lookup();
    return idx;
  }

  void save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write dense index: " + path);
    save(os);
  }

  static DenseIndex load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open dense index: " + path);
    return load(is);
  }

  /// Test hook: builds directly from rows (ids must be strictly ascending).
  static DenseIndex from_rows(std::vector<std::string> ids, std::vector<double> matrix,
                              std::uint32_t dim) {
    DenseIndex idx;
    idx.ids_ = std::move(ids);
    idx.matrix_ = std::move(matrix);
    idx.dim_ = dim;
    for (std::size_t i = 1; i < idx.ids_.size(); ++i)
      if (!(idx.ids_[i - 1] < idx.ids_[i]))
        throw std::invalid_argument("dense index ids must be strictly ascending");
    if (idx.matrix_.size() != idx.ids_.size() * dim)
      throw std::invalid_argument("dense index matrix shape mismatch");
    idx.rebuild_lookup();
    return idx;
  }

 private:
  template <typename Vec, typename Cmp>
  static void shrink(Vec& v, std::size_t k, Cmp cmp) {
    if (v.size() > k) {
      std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end(), cmp);
      v.resize(k);
    }
    std::sort(v.begin(), v.end(), cmp);
  }

  void rebuild_lookup() {
    lookup_.clear();
    for (std::uint32_t i = 0; i < ids_.size(); ++i) {
      if (i > 0 && !(ids_[i - 1] < ids_[i]))
        throw std::runtime_error("dense index ids not strictly ascending");
      lookup_.emplace(ids_[i], i);
    }
  }

  std::uint32_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> matrix_;  // row-major, one row per id
  std::unordered_map<std::string, std::uint32_t> lookup_;
};

}  // namespace hopforge
