// hopboost command-line tool: scoring, evaluation, boosting weights,
// resampling, toy experiments and verification suites.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hopboost/hopboost.h"
#include "json.hpp"

namespace {

// Carries a library status up to main.
struct Failure {
  hb_status status;
  std::string message;
};

void check(hb_status s) {
  if (s != HB_OK) throw Failure{s, hb_last_error()};
}

struct MemoryDeleter {
  void operator()(hb_memory* m) const { hb_memory_free(m); }
};
using Memory = std::unique_ptr<hb_memory, MemoryDeleter>;

struct VectorDeleter {
  void operator()(hb_vector* v) const { hb_vector_free(v); }
};
using Values = std::unique_ptr<hb_vector, VectorDeleter>;

struct ReportDeleter {
  void operator()(hb_report* r) const { hb_report_free(r); }
};
using Report = std::unique_ptr<hb_report, ReportDeleter>;

Memory load_memory(const std::string& path, bool normalize) {
  hb_memory* raw = nullptr;
  check(hb_memory_read(path.c_str(), &raw));
  Memory m(raw);
  if (!normalize) return m;
  hb_memory* unit = nullptr;
  check(hb_memory_normalize(m.get(), &unit));
  return Memory(unit);
}

std::vector<double> load_values(const std::string& path) {
  hb_vector* raw = nullptr;
  check(hb_values_read(path.c_str(), &raw));
  Values v(raw);
  return std::vector<double>(hb_vector_data(v.get()), hb_vector_data(v.get()) + hb_vector_size(v.get()));
}

hb_config make_config(double beta, bool normalize) {
  hb_config cfg = hb_config_default();
  cfg.beta = beta;
  cfg.normalize_inputs = normalize ? 1 : 0;
  return cfg;
}

struct ScoreArgs {
  std::string id_emb, aux_emb, query, out;
  double beta = 4.0;
  bool no_normalize = false;
};

void cmd_score(const ScoreArgs& a) {
  const bool norm = !a.no_normalize;
  const Memory id = load_memory(a.id_emb, norm);
  const Memory aux = load_memory(a.aux_emb, norm);
  const Memory q = load_memory(a.query, norm);
  const hb_config cfg = make_config(a.beta, norm);
  std::vector<double> scores(hb_memory_count(q.get()));
  check(hb_score(&cfg, id.get(), aux.get(), q.get(), scores.data(), scores.size()));
  check(hb_values_write(a.out.c_str(), scores.data(), scores.size()));
}

struct EvalArgs {
  std::string scores_id, scores_ood, out;
  double tpr = 0.95;
};

void cmd_eval(const EvalArgs& a) {
  const auto id = load_values(a.scores_id);
  const auto ood = load_values(a.scores_ood);
  hb_metrics m{};
  check(hb_evaluate(id.data(), id.size(), ood.data(), ood.size(), a.tpr, &m));
  check(hb_metrics_write_json(a.out.c_str(), &m));
  std::printf("fpr@%.17g=%.17g auroc=%.17g gamma=%.17g\n", a.tpr, m.fpr95, m.auroc, m.gamma);
}

struct WeightsArgs {
  std::string id_emb, aux_emb, pool, out;
  double beta = 4.0;
  bool no_normalize = false;
};

void cmd_weights(const WeightsArgs& a) {
  const bool norm = !a.no_normalize;
  const Memory id = load_memory(a.id_emb, norm);
  const Memory aux = load_memory(a.aux_emb, norm);
  const Memory pool = load_memory(a.pool, norm);
  const hb_config cfg = make_config(a.beta, norm);
  std::vector<double> w(hb_memory_count(pool.get()));
  check(hb_update_weights(&cfg, id.get(), aux.get(), pool.get(), w.data(), w.size()));
  check(hb_values_write(a.out.c_str(), w.data(), w.size()));
}

struct SampleArgs {
  std::string weights, out;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

void cmd_sample(const SampleArgs& a) {
  const auto w = load_values(a.weights);
  std::vector<std::size_t> idx(a.n);
  check(hb_weighted_sample(w.data(), w.size(), a.n, a.seed, idx.data()));
  check(hb_indices_write(a.out.c_str(), idx.data(), idx.size()));
}

struct ToyArgs {
  std::string scene, config, out_dir;
  std::optional<double> beta, lambda, lr, lr_growth;
  std::optional<std::uint64_t> steps, resample_every, batch_n, seed, snapshot_every;
  std::optional<std::string> geometry;
  bool full_batch = false;
};

std::string toy_overrides(const ToyArgs& a) {
  nlohmann::json j = nlohmann::json::object();
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw Failure{HB_E_IO, "cannot open '" + a.config + "' for reading"};
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
      throw Failure{HB_E_PARSE, "'" + a.config + "': " + e.what()};
    }
    if (!j.is_object()) throw Failure{HB_E_PARSE, "'" + a.config + "' must hold a JSON object"};
  }
  if (a.beta) j["beta"] = *a.beta;
  if (a.lambda) j["lambda"] = *a.lambda;
  if (a.lr) j["lr"] = *a.lr;
  if (a.lr_growth) j["lr_growth"] = *a.lr_growth;
  if (a.steps) j["steps"] = *a.steps;
  if (a.resample_every) j["resample_every"] = *a.resample_every;
  if (a.batch_n) j["batch_n"] = *a.batch_n;
  if (a.seed) j["seed"] = *a.seed;
  if (a.snapshot_every) j["snapshot_every"] = *a.snapshot_every;
  if (a.geometry) j["geometry"] = *a.geometry;
  if (a.full_batch) j["full_batch"] = true;
  return j.dump();
}

void cmd_toy(const ToyArgs& a) {
  const std::string overrides = toy_overrides(a);
  hb_toy_summary s{};
  check(hb_toy_run(a.scene.c_str(), overrides.c_str(),
                   a.out_dir.empty() ? nullptr : a.out_dir.c_str(), &s));
  std::printf("scene                 %s\n", a.scene.c_str());
  std::printf("snapshots             %zu\n", s.snapshots);
  std::printf("l_ood                 %.9g -> %.9g\n", s.l_ood_initial, s.l_ood_final);
  std::printf("cross_class_dot       %.9g -> %.9g\n", s.cross_dot_initial, s.cross_dot_final);
  std::printf("var_orth              %.9g -> %.9g\n", s.var_orth_initial, s.var_orth_final);
  std::printf("var_par               %.9g -> %.9g\n", s.var_par_initial, s.var_par_final);
  std::printf("agreement_last_batch  %.9g\n", s.agreement_last_batch);
  std::printf("agreement weighted    %.9g\n", s.agreement_weighted);
  std::printf("agreement uniform     %.9g\n", s.agreement_uniform);
}

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 0;
  std::optional<double> tol;
};

int cmd_verify(const VerifyArgs& a) {
  hb_report* raw = nullptr;
  check(hb_verify_run(a.suite.c_str(), a.seed,
                      a.tol ? *a.tol : std::numeric_limits<double>::quiet_NaN(), &raw));
  Report r(raw);
  std::printf("suite %s (seed %llu)\n", a.suite.c_str(), static_cast<unsigned long long>(a.seed));
  for (std::size_t i = 0; i < hb_report_size(r.get()); ++i) {
    hb_report_row_info row{};
    check(hb_report_row(r.get(), i, &row));
    std::printf("%-4s  %-32s  %.6e %-2s %.6e\n", row.pass ? "PASS" : "FAIL", row.name, row.value,
                row.relation, row.threshold);
  }
  const bool ok = hb_report_pass(r.get()) != 0;
  std::printf("%s\n", ok ? "all checks passed" : "verification FAILED");
  return ok ? 0 : hb_status_exit_code(HB_E_VERIFY_FAILED);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hopfield boundary-energy OOD scoring, boosting weights and verification"};
  app.require_subcommand(1);

  ScoreArgs score;
  auto* sc = app.add_subcommand(
      "score",
      "Write s(q) = lse(beta, X^T q) - lse(beta, O^T q) per query. The ID and AUX "
      "embedding files are the stored memories; full-scale setups keep tens of "
      "thousands of ID samples (e.g. 50,000) in memory.");
  sc->add_option("--id-emb", score.id_emb, "ID memory embeddings (.csv or binary)")->required();
  sc->add_option("--aux-emb", score.aux_emb, "AUX memory embeddings")->required();
  sc->add_option("--query", score.query, "query embeddings")->required();
  sc->add_option("--beta", score.beta, "inverse temperature")->capture_default_str();
  sc->add_flag("--no-normalize", score.no_normalize,
               "use raw dot products instead of unit-normalizing every embedding");
  sc->add_option("--out", score.out, "output CSV (index,value)")->required();

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "FPR at a TPR (default 95%) and AUROC from score files");
  ev->add_option("--scores-id", eval.scores_id, "ID score CSV")->required();
  ev->add_option("--scores-ood", eval.scores_ood, "OOD score CSV")->required();
  ev->add_option("--tpr", eval.tpr, "target true-positive rate")->capture_default_str();
  ev->add_option("--out", eval.out, "output metrics JSON")->required();

  WeightsArgs weights;
  auto* wt = app.add_subcommand("weights", "Boosting weights softmax(beta * E_b) over an AUX pool");
  wt->add_option("--id-emb", weights.id_emb, "ID memory embeddings")->required();
  wt->add_option("--aux-emb", weights.aux_emb, "AUX memory embeddings")->required();
  wt->add_option("--pool", weights.pool, "pool embeddings to weight")->required();
  wt->add_option("--beta", weights.beta, "inverse temperature")->capture_default_str();
  wt->add_flag("--no-normalize", weights.no_normalize, "use raw dot products");
  wt->add_option("--out", weights.out, "output CSV (index,value)")->required();

  SampleArgs sample;
  auto* sm = app.add_subcommand("sample", "Draw indices with replacement according to weights");
  sm->add_option("--weights", sample.weights, "weights CSV (index,value)")->required();
  sm->add_option("--n", sample.n, "number of draws")->required();
  sm->add_option("--seed", sample.seed, "random seed")->capture_default_str();
  sm->add_option("--out", sample.out, "output CSV (draw,index)")->required();

  ToyArgs toy;
  auto* ty = app.add_subcommand("toy", "Run a toy boosting experiment (sphere, blobs, interaction)");
  ty->add_option("scene", toy.scene, "sphere | blobs | interaction")->required();
  ty->add_option("--config", toy.config, "JSON object of config keys");
  ty->add_option("--beta", toy.beta);
  ty->add_option("--lambda", toy.lambda);
  ty->add_option("--lr", toy.lr);
  ty->add_option("--lr-growth", toy.lr_growth);
  ty->add_option("--steps", toy.steps);
  ty->add_option("--resample-every", toy.resample_every);
  ty->add_option("--batch-n", toy.batch_n);
  ty->add_option("--seed", toy.seed);
  ty->add_option("--snapshot-every", toy.snapshot_every);
  ty->add_option("--geometry", toy.geometry, "sphere | euclidean");
  ty->add_flag("--full-batch", toy.full_batch, "use every pattern in every step");
  ty->add_option("--out-dir", toy.out_dir, "directory for trajectory, heat maps and summary");

  VerifyArgs verify;
  auto* vf = app.add_subcommand("verify", "Run a numerical verification suite");
  vf->add_option("suite", verify.suite,
                 "gradcheck | identities | rbf | svm | heshe | boundary-mc")
      ->required();
  vf->add_option("--seed", verify.seed, "random seed")->capture_default_str();
  vf->add_option("--tol", verify.tol, "override every tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hb_status_exit_code(HB_E_USAGE);
  }

  try {
    if (*sc) cmd_score(score);
    else if (*ev) cmd_eval(eval);
    else if (*wt) cmd_weights(weights);
    else if (*sm) cmd_sample(sample);
    else if (*ty) cmd_toy(toy);
    else if (*vf) return cmd_verify(verify);
    return 0;
  } catch (const Failure& f) {
    std::fprintf(stderr, "error [%s]: %s\n", hb_status_name(f.status), f.message.c_str());
    return hb_status_exit_code(f.status);
  }
}
