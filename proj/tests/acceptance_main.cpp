// Acceptance suite: one self-contained check per criterion, each printing a
// single pass/fail line. Every expected value is produced by an independent
// oracle (enumeration, finite differences, full-sort, exhaustive pairs,
// reference metric formulas) or derived from the synthetic benchmark.

#include <chrono>
#include <cstdio>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hopforge/bench.hpp"
#include "hopforge/hopforge.hpp"
#include "oracles.hpp"

using namespace hopforge;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, bool ok, const std::string& what, double secs, double limit) {
  bool in_time = secs < limit;
  std::printf("[%s] criterion %d: %s (%.2fs, limit %.0fs)\n",
              ok && in_time ? "PASS" : "FAIL", criterion, what.c_str(), secs, limit);
  if (!(ok && in_time)) ++failures;
}

Corpus word_corpus(const std::vector<std::pair<std::string, std::string>>& id_text) {
  std::vector<Document> docs;
  for (const auto& [id, textv] : id_text) {
    Document d;
    d.id = id;
    d.title = "T " + id;
    d.sentences = {textv};
    docs.push_back(std::move(d));
  }
  return Corpus(std::move(docs));
}

Corpus random_word_corpus(std::size_t n, std::uint64_t seed) {
  const char* vocab[] = {"ash", "bay", "cod", "dew", "elm", "fog", "gem", "hay",
                         "ivy", "jet", "kit", "log", "moss", "net", "oak", "pit"};
  Rng rng(seed);
  std::vector<std::pair<std::string, std::string>> id_text;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    std::size_t len = 4 + rng.uniform_below(5);
    for (std::size_t t = 0; t < len; ++t) {
      if (t) s.push_back(' ');
      s += vocab[rng.uniform_below(16)];
    }
    char id[8];
    std::snprintf(id, sizeof id, "a%03zu", i);
    id_text.emplace_back(id, s);
  }
  return word_corpus(id_text);
}

// ---- 1: loss and gradient against enumeration / finite differences -----------

void criterion_loss_grad() {
  Timer timer;
  bool ok = true;
  std::string detail;
  Rng rng(1001);

  for (int fixture = 0; fixture < 24 && ok; ++fixture) {
    auto corpus = random_word_corpus(8, 2000 + fixture);
    auto ids = corpus.ids();
    std::uint32_t dim = 4 + static_cast<std::uint32_t>(rng.uniform_below(13));  // 4..16
    auto params = init_encoder_params(dim, 32, 3000 + fixture, fixture % 3 == 0);

    TrainingBatch batch;
    std::size_t n_items = 1 + rng.uniform_below(8);
    for (std::size_t i = 0; i < n_items; ++i) {
      BatchItem item;
      item.question = "ash bay " + ids[rng.uniform_below(ids.size())];
      item.positive_id = ids[rng.uniform_below(ids.size())];
      if (rng.uniform_below(2) == 1) {
        std::string prev = ids[rng.uniform_below(ids.size())];
        item.prev_doc_ids.push_back(prev);
        item.hop = 2;
      }
      std::size_t n_negs = rng.uniform_below(3);
      while (item.extra_negative_ids.size() < n_negs) {
        auto neg = ids[rng.uniform_below(ids.size())];
        if (neg != item.positive_id) item.extra_negative_ids.push_back(neg);
      }
      batch.items.push_back(std::move(item));
    }

    auto rep = ndp_loss(params, corpus, batch);
    std::vector<oracles::OracleBatchItem> items;
    for (const auto& it : batch.items)
      items.push_back({it.question, it.prev_doc_ids, it.positive_id, it.extra_negative_ids});
    double expected = oracles::ndp_loss_enumeration(params, corpus, items);
    if (std::abs(rep.loss - expected) > 1e-10) {
      ok = false;
      detail = "loss mismatch on fixture " + std::to_string(fixture);
      break;
    }

    auto grad = ndp_loss_grad(params, corpus, batch);
    const double h = 1e-5;
    auto fd_check = [&](Matrix& m, const Matrix& g) {
      for (std::size_t idx = 0; idx < m.data.size(); ++idx) {
        bool significant = std::abs(g.data[idx]) > 1e-12;
        bool probe_zero = idx % 97 == 0;  // spot-check flat coordinates too
        if (!significant && !probe_zero) continue;
        double saved = m.data[idx];
        m.data[idx] = saved + h;
        double up = ndp_loss(params, corpus, batch).loss;
        m.data[idx] = saved - h;
        double down = ndp_loss(params, corpus, batch).loss;
        m.data[idx] = saved;
        double fd = (up - down) / (2.0 * h);
        double denom = std::max({std::abs(fd), std::abs(g.data[idx]), 1e-8});
        if (std::abs(fd - g.data[idx]) / denom > 1e-4) {
          ok = false;
          detail = "gradient mismatch at coordinate " + std::to_string(idx);
          return;
        }
      }
    };
    fd_check(params.query_proj, grad.query_grad);
    if (ok && !params.shared_projection) fd_check(params.doc_proj, grad.doc_grad);
  }

  report(1, ok, "ndp loss matches enumeration (1e-10) and gradient matches finite differences "
                "(rel 1e-4) on 24 random fixtures" + (detail.empty() ? "" : " -- " + detail),
         timer.seconds(), 10.0);
}

// ---- 2: exact MIPS against full sort ------------------------------------------

void criterion_mips() {
  Timer timer;
  bool ok = true;
  std::string detail;
  Rng rng(42);

  for (int trial = 0; trial < 50 && ok; ++trial) {
    std::size_t n = 20 + rng.uniform_below(981);   // up to 1000 docs
    std::uint32_t dim = 4 + static_cast<std::uint32_t>(rng.uniform_below(61));  // up to 64
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      char id[8];
      std::snprintf(id, sizeof id, "r%04zu", i);
      ids.emplace_back(id);
    }
    std::vector<double> matrix(n * dim);
    for (auto& x : matrix) x = rng.uniform_signed(1.0);
    if (trial % 2 == 0) {
      // duplicate rows create exact score ties
      for (std::size_t i = 1; i < n; i += 2)
        std::copy(matrix.begin(), matrix.begin() + dim,
                  matrix.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    auto index = DenseIndex::from_rows(ids, matrix, dim);
    std::vector<double> q(dim);
    for (auto& x : q) x = rng.uniform_signed(1.0);

    for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{20}}) {
      auto got = index.search(q, k, std::nullopt, trial % 3 == 0 ? 3 : 1);
      auto expect = oracles::mips_full_sort(ids, matrix, dim, q, k);
      if (got.hits.size() != expect.size()) {
        ok = false;
        detail = "size mismatch";
        break;
      }
      for (std::size_t i = 0; i < expect.size(); ++i)
        if (got.hits[i].doc_id != expect[i].id || got.hits[i].score != expect[i].score) {
          ok = false;
          detail = "rank " + std::to_string(i) + " differs on trial " + std::to_string(trial);
          break;
        }
      if (!ok) break;
    }
  }

  report(2, ok, "mips top-k equals the brute-force sort oracle on 50 random indexes "
                "(ties via duplicate rows included)" + (detail.empty() ? "" : " -- " + detail),
         timer.seconds(), 30.0);
}

// ---- 3: beam with b = N equals exhaustive enumeration --------------------------

void criterion_beam_exhaustive() {
  Timer timer;
  bool ok = true;
  std::string detail;

  for (std::size_t n : {std::size_t{6}, std::size_t{15}, std::size_t{28}, std::size_t{40}}) {
    auto corpus = random_word_corpus(n, 500 + n);
    auto params = init_encoder_params(8, 64, 600 + n);
    auto dense = DenseIndex::build(corpus, params);
    RetrievalStrategy strategy;
    strategy.beam_size = static_cast<std::uint32_t>(n);
    std::size_t k_paths = n * (n - 1) / 2;

    for (const char* question : {"ash bay cod", "moss net oak pit"}) {
      auto run = beam_search_paths(params, dense, corpus, nullptr, "q", question, strategy, k_paths);
      auto expect = oracles::exhaustive_pair_paths(params, corpus, question, k_paths);
      if (run.ranked_paths.size() != expect.size()) {
        ok = false;
        detail = "path count differs at n=" + std::to_string(n);
        break;
      }
      for (std::size_t i = 0; i < expect.size(); ++i) {
        if (run.ranked_paths[i].docs != expect[i].docs ||
            std::abs(run.ranked_paths[i].score - expect[i].score) > 1e-12) {
          ok = false;
          detail = "path " + std::to_string(i) + " differs at n=" + std::to_string(n);
          break;
        }
      }
      if (run.encoder_calls != 1 + n) {
        ok = false;
        detail = "encoder calls at n=" + std::to_string(n);
      }
      if (!ok) break;
    }
    if (!ok) break;
  }

  report(3, ok, "beam search at b = N reproduces the exhaustive ordered-pair oracle exactly" +
                    (detail.empty() ? "" : " -- " + detail),
         timer.seconds(), 30.0);
}

// ---- 4: metric formulas against the reference implementation -------------------

void criterion_metrics() {
  Timer timer;
  bool ok = true;
  std::string detail;

  auto corpus = word_corpus({{"a", "the largest planet is Jupiter"},
                             {"b", "saturn has rings"},
                             {"c", "mars is red"},
                             {"d", "venus is bright"},
                             {"e", "mercury is small"}});
  auto ids = corpus.ids();
  std::vector<std::size_t> k_list{1, 2, 3, 4, 6, 10};
  Rng rng(9090);

  for (int fixture = 0; fixture < 25 && ok; ++fixture) {
    std::vector<GoldRecord> gold;
    std::vector<RetrievalRun> runs;
    std::vector<std::pair<std::set<std::string>, std::string>> ref_gold;
    std::vector<std::vector<std::vector<std::string>>> ref_paths;
    std::size_t n_questions = 5 + rng.uniform_below(21);
    for (std::size_t q = 0; q < n_questions; ++q) {
      GoldRecord g;
      g.qid = "q" + std::to_string(q);
      while (g.support.size() < 2) g.support.insert(ids[rng.uniform_below(ids.size())]);
      g.answer = rng.uniform_below(2) ? "Jupiter" : "rings";
      gold.push_back(g);
      ref_gold.emplace_back(g.support, g.answer);

      RetrievalRun run;
      run.qid = g.qid;
      std::vector<std::vector<std::string>> raw;
      std::size_t n_paths = rng.uniform_below(7);
      for (std::size_t i = 0; i < n_paths; ++i) {
        std::string d1 = ids[rng.uniform_below(ids.size())], d2 = d1;
        while (d2 == d1) d2 = ids[rng.uniform_below(ids.size())];
        ReasoningPath p;
        p.docs = {d1, d2};
        p.score = static_cast<double>(n_paths - i);
        run.ranked_paths.push_back(p);
        raw.push_back({d1, d2});
      }
      runs.push_back(run);
      ref_paths.push_back(raw);
    }

    auto rep = evaluate_run(gold, runs, corpus, k_list);
    auto expect = oracles::metrics_reference(ref_gold, ref_paths, corpus, k_list);
    for (std::size_t k : k_list) {
      if (k % 2 == 0 && rep.r_at.at(k) != expect.r_at.at(k)) ok = false;
      if (rep.pathr_at.at(k) != expect.pathr_at.at(k)) ok = false;
      if (rep.ar_at.at(k) != expect.ar_at.at(k)) ok = false;
    }
    if (std::abs(rep.support_em - expect.em) > 1e-12 ||
        std::abs(rep.support_f1 - expect.f1) > 1e-12)
      ok = false;
    if (!ok) detail = "fixture " + std::to_string(fixture);
  }

  // property sweep: monotone in K, invariant to within-path order
  std::size_t cases = 0;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    GoldRecord g;
    g.qid = "q";
    while (g.support.size() < 2) g.support.insert(ids[rng.uniform_below(ids.size())]);
    g.answer = "Jupiter";
    RetrievalRun run;
    run.qid = "q";
    std::size_t n_paths = rng.uniform_below(6);
    for (std::size_t i = 0; i < n_paths; ++i) {
      std::string d1 = ids[rng.uniform_below(ids.size())], d2 = d1;
      while (d2 == d1) d2 = ids[rng.uniform_below(ids.size())];
      ReasoningPath p;
      p.docs = {d1, d2};
      run.ranked_paths.push_back(p);
    }
    RetrievalRun reversed = run;
    for (auto& p : reversed.ranked_paths) std::swap(p.docs[0], p.docs[1]);

    int prev_pr = 0, prev_ar = 0, prev_r = 0;
    for (std::size_t k = 1; k <= 10; ++k) {
      int pr = path_recall_at_k(g, run, k);
      int ar = answer_recall_at_k(g, run, corpus, k);
      if (pr < prev_pr || ar < prev_ar) ok = false;
      if (pr != path_recall_at_k(g, reversed, k)) ok = false;
      if (ar != answer_recall_at_k(g, reversed, corpus, k)) ok = false;
      prev_pr = pr;
      prev_ar = ar;
      if (k % 2 == 0) {
        int r = recall_at_k(g, run, k);
        if (r < prev_r || r != recall_at_k(g, reversed, k)) ok = false;
        prev_r = r;
      }
    }
    ++cases;
    if (!ok) detail = "property case " + std::to_string(trial);
  }

  report(4, ok, "evaluate_run equals the reference metric implementation on 25 fixtures; "
                "monotonicity and order-invariance hold on " + std::to_string(cases) +
                " randomized cases" + (detail.empty() ? "" : " -- " + detail),
         timer.seconds(), 20.0);
}

// ---- 5: cost model exactness ----------------------------------------------------

/// Corpus engineered so hop 1 ranks only hub documents and hop 2 only leaf
/// documents: beam b then yields exactly b*b distinct paths, making every
/// rerank budget up to b*b exactly satisfiable.
struct CostBench {
  Corpus corpus;
  EncoderParams params;
};

CostBench make_cost_bench(std::size_t n_hubs, std::size_t n_leaves) {
  const std::uint32_t buckets = 4096;
  auto bucket = [&](std::string_view tok) {
    return static_cast<std::uint32_t>(text::token_hash(tok, kFeatureHashSeed) % buckets);
  };

  std::vector<Document> docs;
  std::set<std::string> all_tokens;
  for (std::size_t i = 0; i < n_hubs; ++i) {
    Document d;
    char id[8];
    std::snprintf(id, sizeof id, "h%03zu", i);
    d.id = id;
    d.title = "hub" + std::to_string(i);
    std::string s = "hubmark leafcue";
    for (std::size_t t = 0; t < i; ++t) s += " hpad" + std::to_string(i) + "x" + std::to_string(t);
    d.sentences = {s};
    docs.push_back(d);
  }
  for (std::size_t j = 0; j < n_leaves; ++j) {
    Document d;
    char id[8];
    std::snprintf(id, sizeof id, "l%03zu", j);
    d.id = id;
    d.title = "leaf" + std::to_string(j);
    std::string s = "leafmark";
    for (std::size_t t = 0; t < j; ++t) s += " lpad" + std::to_string(j) + "x" + std::to_string(t);
    d.sentences = {s};
    docs.push_back(d);
  }
  Corpus corpus(std::move(docs));
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (const auto& tok : text::tokenize(document_text(corpus.doc_at(i)))) all_tokens.insert(tok);
  all_tokens.insert("hubward");
  all_tokens.insert("sep");

  // the construction relies on the four signal tokens owning their buckets
  std::set<std::uint32_t> special{bucket("hubward"), bucket("hubmark"), bucket("leafmark"),
                                  bucket("leafcue")};
  if (special.size() != 4) throw std::logic_error("cost bench: signal token buckets collide");
  for (const auto& tok : all_tokens) {
    if (tok == "hubward" || tok == "hubmark" || tok == "leafmark" || tok == "leafcue") continue;
    if (special.count(bucket(tok))) throw std::logic_error("cost bench: pad token collides");
  }

  EncoderParams p;
  p.dim = 2;
  p.hash_buckets = buckets;
  p.query_proj = Matrix(2, buckets);
  p.doc_proj = Matrix(2, buckets);
  p.query_proj.at(0, bucket("hubward")) = 1.0;
  p.query_proj.at(1, bucket("leafcue")) = 1.0;
  p.doc_proj.at(0, bucket("hubmark")) = 1.0;
  p.doc_proj.at(1, bucket("leafmark")) = 1000.0;  // hop 2 must dwarf residual hub scores
  return {std::move(corpus), std::move(p)};
}

void criterion_cost_model() {
  Timer timer;
  bool ok = true;
  std::string detail;

  auto bench = make_cost_bench(16, 16);
  auto dense = DenseIndex::build(bench.corpus, bench.params);

  std::vector<BenchQuestion> questions{{"q0", "hubward"}, {"q1", "hubward"}, {"q2", "hubward"}};
  std::vector<GoldRecord> gold;
  for (const auto& q : questions) {
    GoldRecord g;
    g.qid = q.qid;
    g.support = {"h000", "l000"};
    g.answer = "leafmark";
    gold.push_back(g);
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> grid{{2, 4}, {3, 9}, {10, 100}, {13, 169}};
  try {
    auto rows = bench_efficiency(bench.corpus, bench.params, dense, nullptr, RetrievalStrategy{},
                                 questions, gold, {1, 2}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double want_calls = 1.0 + grid[i].first;
      double want_total = want_calls + grid[i].second;
      if (rows[i].mean_encoder_calls != want_calls || rows[i].mean_total_cost != want_total) {
        ok = false;
        detail = "row b=" + std::to_string(grid[i].first) + " r=" + std::to_string(grid[i].second) +
                 " reported " + std::to_string(rows[i].mean_encoder_calls) + "/" +
                 std::to_string(rows[i].mean_total_cost);
      }
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }

  report(5, ok, "sweep costs are exactly 1+b and 1+b+r on the grid including (3,9), (10,100), "
                "(13,169)" + (detail.empty() ? "" : " -- " + detail),
         timer.seconds(), 10.0);
}

// ---- 6: weak-supervision closure on the synthetic benchmark --------------------

void criterion_closure() {
  Timer timer;
  bool ok = true;
  std::string detail;

  SynthConfig cfg;
  cfg.n_docs = 200;
  cfg.n_chains = 50;
  cfg.rng_seed = 7;
  auto synth = generate_synthetic(cfg);
  Corpus corpus(synth.documents);

  GenerationConfig gen;
  gen.rng_seed = 7;
  auto render = [&]() {
    std::ostringstream os;
    std::vector<TrainingTriple> triples;
    generate_dataset(corpus, gen, [&](const TrainingTriple& t) {
      write_triple_line(t, os);
      triples.push_back(t);
    });
    return std::make_pair(os.str(), triples);
  };
  auto [bytes1, triples] = render();
  auto [bytes2, triples2] = render();

  if (bytes1 != bytes2 || bytes1.empty()) {
    ok = false;
    detail = "output not byte-identical across runs";
  }
  if (triples.size() < 50) {
    ok = false;
    detail = "only " + std::to_string(triples.size()) + " triples";
  }

  std::set<std::string> emitted_qids;
  for (const auto& t : triples) {
    emitted_qids.insert(t.qid);
    if (!triple_violations(t, corpus).empty()) {
      ok = false;
      detail = "triple invariant violated for " + t.qid;
    }
    if (text::contains_ci(t.question, corpus.doc(t.chain[0]).title)) {
      ok = false;
      detail = "bridge title leaked in " + t.qid;
    }
  }
  for (const auto& g : synth.gold) {
    if (!emitted_qids.count(g.qid)) {
      ok = false;
      detail = "planted chain not covered: " + g.qid;
      break;
    }
  }
  // the covered triple's chain is exactly [bridge, source]
  for (const auto& t : triples) {
    if (t.qid.substr(0, t.chain[1].size()) != t.chain[1]) {
      ok = false;
      detail = "chain order wrong for " + t.qid;
    }
  }

  report(6, ok, "200-doc/50-chain benchmark: " + std::to_string(triples.size()) +
                " triples, all planted chains covered, zero title leakage, byte-identical reruns" +
                (detail.empty() ? "" : " -- " + detail),
         timer.seconds(), 20.0);
}

// ---- 7 & 8: end-to-end learning signal and few-shot retention ------------------

struct EndToEnd {
  double trained_pathr1 = 0;
  double untrained_pathr1 = 0;
  double tfidf_pathr1 = 0;
  double wiki_pathr1 = 0;
  double trained_pathr5 = 0;
  double fewshot_pathr5 = 0;
};

double mean_path_recall(const std::vector<GoldRecord>& gold, const std::vector<RetrievalRun>& runs,
                        std::size_t k) {
  double acc = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) acc += path_recall_at_k(gold[i], runs[i], k);
  return acc / static_cast<double>(runs.size());
}

EndToEnd run_end_to_end() {
  SynthConfig cfg;
  cfg.n_docs = 500;
  cfg.n_chains = 125;
  cfg.rng_seed = 7;
  auto synth = generate_synthetic(cfg);
  Corpus corpus(synth.documents);

  GenerationConfig gen;
  gen.rng_seed = 7;
  std::vector<TrainingTriple> triples;
  generate_dataset(corpus, gen, [&](const TrainingTriple& t) { triples.push_back(t); });

  // hold out the last 20% of planted chains entirely
  std::size_t n_eval = synth.gold.size() / 5;
  std::set<std::string> eval_qids;
  std::vector<GoldRecord> eval_gold(synth.gold.end() - static_cast<std::ptrdiff_t>(n_eval),
                                    synth.gold.end());
  for (const auto& g : eval_gold) eval_qids.insert(g.qid);

  std::vector<TrainingTriple> train_triples;
  std::vector<const TrainingTriple*> eval_triples(n_eval, nullptr);
  for (const auto& t : triples) {
    if (!eval_qids.count(t.qid)) {
      train_triples.push_back(t);
      continue;
    }
    for (std::size_t i = 0; i < eval_gold.size(); ++i)
      if (eval_gold[i].qid == t.qid) eval_triples[i] = &t;
  }
  for (const auto* t : eval_triples)
    if (!t) throw std::runtime_error("missing evaluation triple for a held-out chain");

  // training never touches the held-out chains' documents: they are removed
  // from the corpus the trainer (and its negative miner) sees
  std::set<std::string> eval_docs;
  for (const auto& g : eval_gold) eval_docs.insert(g.support.begin(), g.support.end());
  std::vector<Document> train_docs;
  for (const auto& d : synth.documents)
    if (!eval_docs.count(d.id)) train_docs.push_back(d);
  Corpus train_corpus(std::move(train_docs));

  auto sparse = SparseIndex::build(corpus);

  auto evaluate_strategy = [&](const EncoderParams& params, const char* name, std::size_t k) {
    auto dense = DenseIndex::build(corpus, params);
    RetrievalStrategy strategy = strategy_from_string(name);
    strategy.beam_size = 4;
    std::vector<RetrievalRun> runs;
    for (std::size_t i = 0; i < eval_triples.size(); ++i)
      runs.push_back(beam_search_paths(params, dense, corpus, &sparse, eval_triples[i]->qid,
                                       eval_triples[i]->question, strategy, 5));
    return mean_path_recall(eval_gold, runs, k);
  };

  // sparse paired baseline (seed-free)
  EndToEnd out;
  {
    std::vector<RetrievalRun> runs;
    for (std::size_t i = 0; i < eval_triples.size(); ++i) {
      RetrievalRun run;
      run.qid = eval_triples[i]->qid;
      run.ranked_paths = paired_document_list(sparse.retrieve(eval_triples[i]->question, 10, true));
      runs.push_back(std::move(run));
    }
    out.tfidf_pathr1 = mean_path_recall(eval_gold, runs, 1);
  }

  TrainConfig tc;
  tc.epochs = 30;
  tc.batch_size = 32;
  tc.learning_rate = 0.5;
  tc.tfidf_negatives = 2;

  std::vector<TrainingTriple> fewshot(train_triples.begin(),
                                      train_triples.begin() +
                                          static_cast<std::ptrdiff_t>(train_triples.size() / 10));

  const std::uint64_t seeds[] = {11, 22, 33, 44, 55};
  for (std::uint64_t seed : seeds) {
    auto init = init_encoder_params(64, 4096, seed);
    out.untrained_pathr1 += evaluate_strategy(init, "all", 1);

    tc.seed = seed;
    auto trained = train(init, train_triples, train_corpus, tc);
    out.trained_pathr1 += evaluate_strategy(trained.params, "all", 1);
    out.wiki_pathr1 += evaluate_strategy(trained.params, "wiki", 1);
    out.trained_pathr5 += evaluate_strategy(trained.params, "all", 5);

    auto few = train(init, fewshot, train_corpus, tc);
    out.fewshot_pathr5 += evaluate_strategy(few.params, "all", 5);
  }
  const double n_seeds = 5.0;
  out.untrained_pathr1 /= n_seeds;
  out.trained_pathr1 /= n_seeds;
  out.wiki_pathr1 /= n_seeds;
  out.trained_pathr5 /= n_seeds;
  out.fewshot_pathr5 /= n_seeds;
  return out;
}

void criteria_end_to_end() {
  Timer timer;
  EndToEnd r;
  bool ran = true;
  std::string err;
  try {
    r = run_end_to_end();
  } catch (const std::exception& e) {
    ran = false;
    err = e.what();
  }
  double secs = timer.seconds();

  {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "held-out PathR@1 trained %.3f vs untrained %.3f and tf-idf paired %.3f "
                  "(margin 0.15), wiki %.3f >= unconstrained %.3f",
                  r.trained_pathr1, r.untrained_pathr1, r.tfidf_pathr1, r.wiki_pathr1,
                  r.trained_pathr1);
    bool ok = ran && r.trained_pathr1 >= r.untrained_pathr1 + 0.15 &&
              r.trained_pathr1 >= r.tfidf_pathr1 + 0.15 && r.wiki_pathr1 >= r.trained_pathr1;
    report(7, ok, ran ? buf : "end-to-end run failed -- " + err, secs, 300.0);
  }
  {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "few-shot (10%% triples) PathR@5 %.3f retains %.0f%% of full-data %.3f "
                  "(threshold 70%%)",
                  r.fewshot_pathr5,
                  r.trained_pathr5 > 0 ? 100.0 * r.fewshot_pathr5 / r.trained_pathr5 : 0.0,
                  r.trained_pathr5);
    bool ok = ran && r.trained_pathr5 > 0 && r.fewshot_pathr5 >= 0.7 * r.trained_pathr5;
    report(8, ok, ran ? buf : "end-to-end run failed -- " + err, secs, 300.0);
  }
}

}  // namespace

int main() {
  criterion_loss_grad();
  criterion_mips();
  criterion_beam_exhaustive();
  criterion_metrics();
  criterion_cost_model();
  criterion_closure();
  criteria_end_to_end();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
