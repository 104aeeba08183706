// hopforge: multi-hop retrieval pipeline driver.
//
// Subcommands cover the full loop: synthesize or ingest a corpus, generate
// weak-supervision triples, build sparse/dense indexes, train the dual
// encoder, retrieve reasoning paths, evaluate, and sweep cost/recall grids.
// Every run writes a manifest (resolved config + input/output checksums)
// next to its outputs, and all randomness flows from --seed.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hopforge/bench.hpp"
#include "hopforge/hopforge.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum class LogLevel { kOff = 0, kError = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level() {
  const char* env = std::getenv("HOPFORGE_LOG");
  if (!env) return LogLevel::kInfo;
  std::string v = env;
  if (v == "off") return LogLevel::kOff;
  if (v == "error") return LogLevel::kError;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) std::cerr << "[hopforge] " << msg << '\n';
}

std::string checksum_hex(const std::string& path) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hopforge::bytes::file_checksum(path)));
  return buf;
}

/// Run manifest: one JSON per subcommand invocation, written next to the
/// outputs so downstream stages can verify what they consume.
class Manifest {
 public:
  Manifest(std::string subcommand, fs::path out_dir)
      : sub_(std::move(subcommand)), out_dir_(std::move(out_dir)), start_(clock_t::now()) {
    j_["subcommand"] = sub_;
  }

  ordered_json& config() { return j_["config"]; }

  void add_input(const std::string& path) { j_["inputs"][path] = checksum_hex(path); }
  void add_output(const std::string& path) { j_["outputs"][path] = checksum_hex(path); }

  void write() {
    auto secs = std::chrono::duration<double>(clock_t::now() - start_).count();
    j_["duration_seconds"] = secs;
    fs::path p = out_dir_ / (sub_ + ".manifest.json");
    std::ofstream os(p, std::ios::binary);
    os << j_.dump(2) << '\n';
    log_info("wrote " + p.string());
  }

 private:
  using clock_t = std::chrono::steady_clock;
  std::string sub_;
  fs::path out_dir_;
  clock_t::time_point start_;
  ordered_json j_;
};

struct QuestionsFile {
  std::vector<hopforge::BenchQuestion> questions;
};

QuestionsFile read_questions_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open questions file: " + path);
  QuestionsFile out;
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
      throw std::runtime_error("questions line " + std::to_string(line_no) + ": " + e.what());
    }
    out.questions.push_back({j.at("qid").get<std::string>(), j.at("question").get<std::string>()});
  }
  return out;
}

std::vector<std::size_t> parse_k_list(const std::string& csv) {
  std::vector<std::size_t> ks;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) ks.push_back(std::stoul(item));
  }
  if (ks.empty()) throw std::runtime_error("empty --k-list");
  return ks;
}

std::vector<std::uint32_t> parse_u32_list(const std::string& csv) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  }
  return out;
}

unsigned resolve_threads(unsigned flag) {
  return flag == 0 ? hopforge::default_thread_count() : flag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hopforge: weakly supervised multi-hop document retrieval"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string out_dir = ".";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--out-dir", out_dir, "directory for outputs and manifests")->capture_default_str();
  app.add_option("--seed", seed, "seed for all randomness")->capture_default_str();
  app.add_option("--threads", threads, "thread cap, 0 = all cores")->capture_default_str();

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "validate a corpus file and write a canonical copy");
  std::string in_corpus;
  bool lax = false;
  ingest->add_option("--corpus", in_corpus, "line-delimited corpus file")->required();
  ingest->add_flag("--lax", lax, "drop offending links/documents instead of aborting");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark corpus and gold set");
  hopforge::SynthConfig synth_cfg;
  synth->add_option("--n-docs", synth_cfg.n_docs)->capture_default_str();
  synth->add_option("--n-chains", synth_cfg.n_chains)->capture_default_str();
  synth->add_option("--vocab-size", synth_cfg.vocab_size)->capture_default_str();
  synth->add_option("--tokens-per-sentence", synth_cfg.tokens_per_sentence)->capture_default_str();

  // ---- gen-weak ----
  auto* gen = app.add_subcommand("gen-weak", "generate pseudo question/chain/answer triples");
  std::string gen_corpus;
  hopforge::GenerationConfig gen_cfg;
  std::string gen_policy = "hyperlink_mentions";
  bool emit_gold = false;
  gen->add_option("--corpus", gen_corpus)->required();
  gen->add_option("--max-per-doc", gen_cfg.max_triples_per_doc)->capture_default_str();
  gen->add_option("--min-sentence-tokens", gen_cfg.min_sentence_tokens)->capture_default_str();
  gen->add_option("--policy", gen_policy, "hyperlink_mentions | capitalized_spans")
      ->capture_default_str();
  gen->add_flag("--emit-gold", emit_gold, "also write a gold file derived from the triples");

  // ---- build-sparse ----
  auto* bsparse = app.add_subcommand("build-sparse", "build the tf-idf inverted index");
  std::string bs_corpus;
  bsparse->add_option("--corpus", bs_corpus)->required();

  // ---- build-dense ----
  auto* bdense = app.add_subcommand("build-dense", "encode every document into the dense index");
  std::string bd_corpus, bd_params;
  bdense->add_option("--corpus", bd_corpus)->required();
  bdense->add_option("--params", bd_params, "encoder params file")->required();

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "fine-tune the dual encoder on triples");
  std::string tr_corpus, tr_triples, tr_params_in;
  hopforge::TrainConfig train_cfg;
  std::uint32_t tr_dim = 64, tr_buckets = 4096;
  bool tr_shared = false;
  train_cmd->add_option("--corpus", tr_corpus)->required();
  train_cmd->add_option("--triples", tr_triples)->required();
  train_cmd->add_option("--params", tr_params_in, "initial params (default: fresh random init)");
  train_cmd->add_option("--dim", tr_dim, "embedding dim for fresh init")->capture_default_str();
  train_cmd->add_option("--hash-buckets", tr_buckets, "feature buckets for fresh init")
      ->capture_default_str();
  train_cmd->add_flag("--shared-projection", tr_shared, "one matrix for both encoder sides");
  train_cmd->add_option("--epochs", train_cfg.epochs)->capture_default_str();
  train_cmd->add_option("--batch-size", train_cfg.batch_size)->capture_default_str();
  train_cmd->add_option("--lr", train_cfg.learning_rate)->capture_default_str();
  train_cmd->add_option("--tfidf-negatives", train_cfg.tfidf_negatives)->capture_default_str();

  // ---- retrieve ----
  auto* retrieve = app.add_subcommand("retrieve", "beam-search reasoning paths per question");
  std::string rt_corpus, rt_params, rt_dense, rt_sparse, rt_questions, rt_strategy = "all";
  std::uint32_t rt_beam = 4;
  std::size_t rt_kpaths = 0;
  std::uint32_t rt_rerank = 0;
  std::uint32_t rt_sparse_n = 200;
  retrieve->add_option("--corpus", rt_corpus)->required();
  retrieve->add_option("--params", rt_params)->required();
  retrieve->add_option("--dense-index", rt_dense)->required();
  retrieve->add_option("--sparse-index", rt_sparse, "needed by sparse strategies");
  retrieve->add_option("--questions", rt_questions, "jsonl with qid and question")->required();
  retrieve->add_option("--beam", rt_beam)->capture_default_str();
  retrieve->add_option("--k-paths", rt_kpaths, "paths per question (default: beam size)");
  retrieve->add_option("--strategy", rt_strategy, "all | sparse | wiki | sparse+wiki")
      ->capture_default_str();
  retrieve->add_option("--rerank-inputs", rt_rerank, "0 disables the reranking stage")
      ->capture_default_str();
  retrieve->add_option("--sparse-n", rt_sparse_n, "sparse narrowing pool size")
      ->capture_default_str();

  // ---- evaluate ----
  auto* eval = app.add_subcommand("evaluate", "score a predictions file against gold");
  std::string ev_corpus, ev_gold, ev_pred, ev_klist = "1,2,5,10,20";
  eval->add_option("--corpus", ev_corpus)->required();
  eval->add_option("--gold", ev_gold)->required();
  eval->add_option("--predictions", ev_pred)->required();
  eval->add_option("--k-list", ev_klist)->capture_default_str();

  // ---- bench-efficiency ----
  auto* bench = app.add_subcommand("bench-efficiency", "sweep (beam, rerank) cost/recall grid");
  std::string be_corpus, be_params, be_dense, be_sparse, be_questions, be_gold;
  std::string be_beams = "3,10,13", be_reranks = "9,100,169", be_klist = "1,2,10",
              be_strategy = "all";
  bench->add_option("--corpus", be_corpus)->required();
  bench->add_option("--params", be_params)->required();
  bench->add_option("--dense-index", be_dense)->required();
  bench->add_option("--sparse-index", be_sparse);
  bench->add_option("--questions", be_questions)->required();
  bench->add_option("--gold", be_gold)->required();
  bench->add_option("--beam-grid", be_beams, "comma list, paired with --rerank-grid")
      ->capture_default_str();
  bench->add_option("--rerank-grid", be_reranks)->capture_default_str();
  bench->add_option("--k-list", be_klist)->capture_default_str();
  bench->add_option("--strategy", be_strategy)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    fs::create_directories(out_dir);
    fs::path out(out_dir);
    unsigned n_threads = resolve_threads(threads);

    if (*ingest) {
      Manifest man("ingest", out);
      man.config()["corpus"] = in_corpus;
      man.config()["strict"] = !lax;
      man.add_input(in_corpus);
      hopforge::IngestReport rep;
      auto corpus = hopforge::ingest_corpus_file(in_corpus, !lax, &rep);
      auto corpus_out = (out / "corpus.jsonl").string();
      hopforge::serialize_corpus_file(corpus, corpus_out);
      ordered_json rj;
      rj["documents"] = rep.documents;
      rj["links_kept"] = rep.links_kept;
      rj["links_dangling"] = rep.links_dangling;
      rj["dropped"] = rep.dropped;
      auto report_out = (out / "ingest_report.json").string();
      std::ofstream(report_out, std::ios::binary) << rj.dump(2) << '\n';
      man.add_output(corpus_out);
      man.add_output(report_out);
      man.write();
      log_info("ingested " + std::to_string(rep.documents) + " documents, dropped " +
               std::to_string(rep.total_dropped()));
    } else if (*synth) {
      synth_cfg.rng_seed = seed;
      Manifest man("synth", out);
      man.config()["n_docs"] = synth_cfg.n_docs;
      man.config()["n_chains"] = synth_cfg.n_chains;
      man.config()["vocab_size"] = synth_cfg.vocab_size;
      man.config()["tokens_per_sentence"] = synth_cfg.tokens_per_sentence;
      man.config()["seed"] = seed;
      auto corpus_out = (out / "corpus.jsonl").string();
      auto gold_out = (out / "gold.jsonl").string();
      hopforge::write_synthetic(synth_cfg, corpus_out, gold_out);
      man.add_output(corpus_out);
      man.add_output(gold_out);
      man.write();
    } else if (*gen) {
      gen_cfg.rng_seed = seed;
      gen_cfg.answer_entity_policy = hopforge::answer_policy_from_string(gen_policy);
      Manifest man("gen-weak", out);
      man.config()["corpus"] = gen_corpus;
      man.config()["max_triples_per_doc"] = gen_cfg.max_triples_per_doc;
      man.config()["min_sentence_tokens"] = gen_cfg.min_sentence_tokens;
      man.config()["policy"] = gen_policy;
      man.config()["seed"] = seed;
      man.add_input(gen_corpus);

      auto corpus = hopforge::ingest_corpus_file(gen_corpus, /*strict=*/true);
      auto triples_out = (out / "triples.jsonl").string();
      auto report_out = (out / "gen_report.json").string();
      std::ofstream ts(triples_out, std::ios::binary);
      std::ofstream gs;
      std::string gold_out;
      if (emit_gold) {
        gold_out = (out / "triples_gold.jsonl").string();
        gs.open(gold_out, std::ios::binary);
      }
      std::size_t emitted = 0;
      auto report = hopforge::generate_dataset(corpus, gen_cfg, [&](const hopforge::TrainingTriple& t) {
        hopforge::write_triple_line(t, ts);
        ++emitted;
        if (emit_gold) {
          hopforge::GoldRecord g;
          g.qid = t.qid;
          g.support = {t.chain[0], t.chain[1]};
          g.answer = t.answer;
          hopforge::write_gold_line(g, gs);
        }
      });
      std::ofstream rs(report_out, std::ios::binary);
      hopforge::write_generation_report(report, rs);
      ts.close();
      rs.close();
      if (emit_gold) gs.close();
      man.add_output(triples_out);
      man.add_output(report_out);
      if (emit_gold) man.add_output(gold_out);
      man.write();
      log_info("emitted " + std::to_string(emitted) + " triples (" +
               std::to_string(report.total_skipped()) + " skipped)");
    } else if (*bsparse) {
      Manifest man("build-sparse", out);
      man.config()["corpus"] = bs_corpus;
      man.add_input(bs_corpus);
      auto corpus = hopforge::ingest_corpus_file(bs_corpus, true);
      auto idx = hopforge::SparseIndex::build(corpus);
      auto idx_out = (out / "sparse.idx").string();
      idx.save_file(idx_out);
      man.add_output(idx_out);
      man.write();
      log_info("sparse index: " + std::to_string(idx.doc_count()) + " docs, " +
               std::to_string(idx.vocab_size()) + " terms");
    } else if (*bdense) {
      Manifest man("build-dense", out);
      man.config()["corpus"] = bd_corpus;
      man.config()["params"] = bd_params;
      man.config()["threads"] = n_threads;
      man.add_input(bd_corpus);
      man.add_input(bd_params);
      auto corpus = hopforge::ingest_corpus_file(bd_corpus, true);
      auto params = hopforge::load_params_file(bd_params);
      auto idx = hopforge::DenseIndex::build(corpus, params, n_threads);
      auto idx_out = (out / "dense.idx").string();
      idx.save_file(idx_out);
      man.add_output(idx_out);
      man.write();
      log_info("dense index: " + std::to_string(idx.size()) + " rows, dim " +
               std::to_string(idx.dim()));
    } else if (*train_cmd) {
      train_cfg.seed = seed;
      Manifest man("train", out);
      man.config()["corpus"] = tr_corpus;
      man.config()["triples"] = tr_triples;
      man.config()["epochs"] = train_cfg.epochs;
      man.config()["batch_size"] = train_cfg.batch_size;
      man.config()["learning_rate"] = train_cfg.learning_rate;
      man.config()["tfidf_negatives"] = train_cfg.tfidf_negatives;
      man.config()["seed"] = seed;
      man.add_input(tr_corpus);
      man.add_input(tr_triples);

      auto corpus = hopforge::ingest_corpus_file(tr_corpus, true);
      auto triples = hopforge::read_triples_file(tr_triples);
      hopforge::EncoderParams init;
      if (!tr_params_in.empty()) {
        man.add_input(tr_params_in);
        man.config()["params_in"] = tr_params_in;
        init = hopforge::load_params_file(tr_params_in);
      } else {
        man.config()["dim"] = tr_dim;
        man.config()["hash_buckets"] = tr_buckets;
        man.config()["shared_projection"] = tr_shared;
        init = hopforge::init_encoder_params(tr_dim, tr_buckets, seed, tr_shared);
      }
      auto outcome = hopforge::train(init, triples, corpus, train_cfg);
      auto params_out = (out / "params.bin").string();
      auto history_out = (out / "history.csv").string();
      hopforge::save_params_file(outcome.params, params_out);
      std::ofstream hs(history_out, std::ios::binary);
      hopforge::write_history_csv(outcome.history, hs);
      hs.close();
      man.add_output(params_out);
      man.add_output(history_out);
      man.write();
      if (!outcome.history.empty())
        log_info("trained " + std::to_string(train_cfg.epochs) + " epochs, final mean loss " +
                 std::to_string(outcome.history.back().mean_loss));
    } else if (*retrieve) {
      Manifest man("retrieve", out);
      auto strategy = hopforge::strategy_from_string(rt_strategy);
      strategy.beam_size = rt_beam;
      strategy.sparse_n = std::max(rt_sparse_n, rt_beam);
      std::size_t k_paths = rt_kpaths == 0 ? rt_beam : rt_kpaths;
      man.config()["corpus"] = rt_corpus;
      man.config()["params"] = rt_params;
      man.config()["strategy"] = rt_strategy;
      man.config()["beam"] = rt_beam;
      man.config()["k_paths"] = k_paths;
      man.config()["rerank_inputs"] = rt_rerank;
      man.config()["sparse_n"] = strategy.sparse_n;
      man.config()["threads"] = n_threads;
      man.add_input(rt_corpus);
      man.add_input(rt_params);
      man.add_input(rt_dense);
      man.add_input(rt_questions);

      auto corpus = hopforge::ingest_corpus_file(rt_corpus, true);
      auto params = hopforge::load_params_file(rt_params);
      auto dense = hopforge::DenseIndex::load_file(rt_dense);
      std::optional<hopforge::SparseIndex> sparse;
      if (!rt_sparse.empty()) {
        man.add_input(rt_sparse);
        sparse = hopforge::SparseIndex::load_file(rt_sparse);
      }
      auto questions = read_questions_file(rt_questions);
      auto scorer = hopforge::make_lexical_overlap_scorer(corpus);

      auto pred_out = (out / "predictions.jsonl").string();
      std::ofstream ps(pred_out, std::ios::binary);
      for (const auto& q : questions.questions) {
        auto run = hopforge::beam_search_paths(params, dense, corpus,
                                               sparse ? &*sparse : nullptr, q.qid, q.question,
                                               strategy, k_paths, n_threads);
        if (rt_rerank > 0) {
          auto r = std::min<std::size_t>(rt_rerank, run.ranked_paths.size());
          run = hopforge::rerank_paths(run, q.question, scorer, r);
        }
        hopforge::write_prediction_line(run, ps);
      }
      ps.close();
      man.add_output(pred_out);
      man.write();
      log_info("retrieved paths for " + std::to_string(questions.questions.size()) + " questions");
    } else if (*eval) {
      Manifest man("evaluate", out);
      man.config()["corpus"] = ev_corpus;
      man.config()["gold"] = ev_gold;
      man.config()["predictions"] = ev_pred;
      man.config()["k_list"] = ev_klist;
      man.add_input(ev_corpus);
      man.add_input(ev_gold);
      man.add_input(ev_pred);

      auto corpus = hopforge::ingest_corpus_file(ev_corpus, true);
      auto gold = hopforge::read_gold_file(ev_gold);
      auto runs = hopforge::read_predictions_file(ev_pred);
      auto k_list = parse_k_list(ev_klist);
      auto rep = hopforge::evaluate_run(gold, runs, corpus, k_list);
      auto j = hopforge::metric_report_json(rep);
      std::cout << j.dump(2) << std::endl;
      auto report_out = (out / "report.json").string();
      std::ofstream(report_out, std::ios::binary) << j.dump(2) << '\n';
      auto csv_out = (out / "k_sweep.csv").string();
      std::ofstream cs(csv_out, std::ios::binary);
      hopforge::write_metric_csv(rep, cs);
      cs.close();
      man.add_output(report_out);
      man.add_output(csv_out);
      man.write();
    } else if (*bench) {
      Manifest man("bench-efficiency", out);
      man.config()["beam_grid"] = be_beams;
      man.config()["rerank_grid"] = be_reranks;
      man.config()["strategy"] = be_strategy;
      man.config()["k_list"] = be_klist;
      man.add_input(be_corpus);
      man.add_input(be_params);
      man.add_input(be_dense);
      man.add_input(be_questions);
      man.add_input(be_gold);

      auto corpus = hopforge::ingest_corpus_file(be_corpus, true);
      auto params = hopforge::load_params_file(be_params);
      auto dense = hopforge::DenseIndex::load_file(be_dense);
      std::optional<hopforge::SparseIndex> sparse;
      if (!be_sparse.empty()) {
        man.add_input(be_sparse);
        sparse = hopforge::SparseIndex::load_file(be_sparse);
      }
      auto questions = read_questions_file(be_questions);
      auto gold = hopforge::read_gold_file(be_gold);
      auto beams = parse_u32_list(be_beams);
      auto reranks = parse_u32_list(be_reranks);
      if (beams.size() != reranks.size())
        throw std::runtime_error("--beam-grid and --rerank-grid must pair up");
      std::vector<std::pair<std::uint32_t, std::uint32_t>> grid;
      for (std::size_t i = 0; i < beams.size(); ++i) grid.emplace_back(beams[i], reranks[i]);

      auto rows = hopforge::bench_efficiency(corpus, params, dense, sparse ? &*sparse : nullptr,
                                             hopforge::strategy_from_string(be_strategy),
                                             questions.questions, gold, parse_k_list(be_klist),
                                             grid, n_threads);
      auto csv_out = (out / "bench.csv").string();
      std::ofstream cs(csv_out, std::ios::binary);
      hopforge::write_bench_csv(rows, parse_k_list(be_klist), cs);
      cs.close();
      man.add_output(csv_out);
      man.write();
      log_info("bench grid of " + std::to_string(rows.size()) + " settings written");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
