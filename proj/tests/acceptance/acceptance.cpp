// Acceptance checks: one PASS/FAIL line per criterion. Library results are
// compared with the reference implementations in oracles.cpp; the format
// and command-line checks drive the installed CLI binary.
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hopboost/baselines.hpp"
#include "hopboost/boosting.hpp"
#include "hopboost/energy.hpp"
#include "hopboost/gradients.hpp"
#include "hopboost/io.hpp"
#include "hopboost/metrics.hpp"
#include "hopboost/toy_lab.hpp"
#include "hopboost/toy_runner.hpp"
#include "oracles.hpp"

using namespace hopboost;
namespace fs = std::filesystem;
using oracle::Mat;
using oracle::Real;
using oracle::Vec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr std::array<double, 3> kBetas{0.5, 4.0, 32.0};

Mat unit_matrix(std::mt19937_64& rng, int d, int n) {
  std::normal_distribution<double> g;
  Mat m(d, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) m(i, j) = g(rng);
    m.col(j).normalize();
  }
  return m;
}

Vec unit_vector(std::mt19937_64& rng, int d) { return unit_matrix(rng, d, 1).col(0); }

// A random identity-suite instance: d ≤ 16, N, M ≤ 32, unit-norm columns.
struct Instance {
  double beta;
  Mat x, o;
  Vec q;
};

Instance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(0x5eed0000ULL + seed);
  std::uniform_int_distribution<int> dim(2, 16), cnt(1, 32);
  const int d = dim(rng);
  Instance in{kBetas[seed % 3], unit_matrix(rng, d, cnt(rng)), unit_matrix(rng, d, cnt(rng)), {}};
  in.q = unit_vector(rng, d);
  return in;
}

// ---------------------------------------------------------------------------

Outcome identities() {
  double e_forms = 0, e_var = 0, e_logit = 0, e_oracle_eb = 0, e_oracle_s = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Instance in = random_instance(i);
    const HopfieldConfig cfg{in.beta};
    const PatternMemory x(in.x, true), o(in.o, true);
    const double eb = boundary_energy(cfg, in.q, x, o);
    const double lc = boundary_energy_logcosh(cfg, in.q, x, o);
    const Posterior p = posterior_pair(cfg, in.q, x, o);
    const double s = score(cfg, in.q, x, o);
    e_forms = std::max(e_forms, std::abs(eb - lc));
    e_var = std::max(e_var, std::abs(std::exp(in.beta * eb) - p.p_id * p.p_aux));
    e_logit = std::max(e_logit, std::abs(s - (std::log(p.p_id) - std::log(p.p_aux)) / in.beta));
    e_oracle_eb = std::max(
        e_oracle_eb,
        static_cast<double>(std::abs(eb - oracle::boundary_energy(in.beta, in.x, in.o, in.q))));
    e_oracle_s = std::max(
        e_oracle_s, static_cast<double>(std::abs(s - oracle::score(in.beta, in.x, in.o, in.q))));
  }
  const bool pass = e_forms < 1e-9 && e_var < 1e-10 && e_logit < 1e-10 && e_oracle_eb < 1e-9 &&
                    e_oracle_s < 1e-10;
  return {pass, fmt("1000 instances; max |E_b - logcosh| %.2e (<1e-9), |exp(bE_b) - p_id p_aux| "
                    "%.2e (<1e-10), |s - logit/b| %.2e (<1e-10); vs oracle E_b %.2e, s %.2e",
                    e_forms, e_var, e_logit, e_oracle_eb, e_oracle_s)};
}

Outcome gradients() {
  const double h = 1e-5;
  double worst_mhe = 0, worst_direct = 0, worst_tanh = 0, worst_dx = 0, worst_do = 0, worst_upd = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance in = random_instance(1000 + seed);
    const HopfieldConfig cfg{in.beta};
    const Real beta = in.beta;
    const PatternMemory x(in.x, true), o(in.o, true);

    const Vec fd_mhe =
        oracle::fd_vector([&](const Vec& v) { return oracle::mhe(beta, in.x, v); }, in.q, h);
    const Vec g_mhe = grad_query_mhe(cfg, in.q, x);
    worst_mhe = std::max(worst_mhe, oracle::rel_err(g_mhe, fd_mhe));

    const Vec fd_q = oracle::fd_vector(
        [&](const Vec& v) { return oracle::boundary_energy(beta, in.x, in.o, v); }, in.q, h);
    worst_direct =
        std::max(worst_direct, oracle::rel_err(grad_query_boundary(cfg, in.q, x, o), fd_q));
    worst_tanh =
        std::max(worst_tanh, oracle::rel_err(grad_query_boundary_tanh(cfg, in.q, x, o), fd_q));

    const MemoryGrad mg = grad_memory_boundary(cfg, in.q, x, o);
    const Vec fd_x = oracle::fd_matrix(
        [&](const Mat& m) { return oracle::boundary_energy(beta, m, in.o, in.q); }, in.x, h);
    const Vec fd_o = oracle::fd_matrix(
        [&](const Mat& m) { return oracle::boundary_energy(beta, in.x, m, in.q); }, in.o, h);
    worst_dx = std::max(worst_dx, oracle::rel_err(mg.d_id.reshaped(), fd_x));
    worst_do = std::max(worst_do, oracle::rel_err(mg.d_aux.reshaped(), fd_o));

    const Vec upd = hopfield_update(cfg, in.q, x);
    worst_upd = std::max(worst_upd, (upd - (in.q - g_mhe)).cwiseAbs().maxCoeff());
  }
  const double worst = std::max({worst_mhe, worst_direct, worst_tanh, worst_dx, worst_do});
  const bool pass = worst < 1e-6 && worst_upd <= 4 * std::numeric_limits<double>::epsilon();
  return {pass, fmt("100 seeds, h=1e-5; max rel err: query-MHE %.2e, query-E_b direct %.2e, tanh "
                    "%.2e, dX %.2e, dO %.2e (<1e-6); |update - (xi - grad)| %.2e (rounding)",
                    worst_mhe, worst_direct, worst_tanh, worst_dx, worst_do, worst_upd)};
}

Outcome mixture() {
  double worst_spread = 0, worst_const = 0, worst_density = 0;
  std::mt19937_64 rng(3003);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dim(2, 16), cnt(1, 32);
  for (int i = 0; i < 200; ++i) {
    const double beta = kBetas[static_cast<std::size_t>(i) % 3];
    const int d = dim(rng);
    const Mat c = unit_matrix(rng, d, cnt(rng));
    const HopfieldConfig cfg{beta, false};
    const PatternMemory mem(c, true);
    double lo = INFINITY, hi = -INFINITY;
    for (int k = 0; k < 10; ++k) {
      Vec q(d);
      for (auto& v : q) v = 0.7 * g(rng);
      const double lib_density = gaussian_mixture_logdensity(cfg, q, mem);
      const double diff = mhe(cfg, q, mem, true) + lib_density / beta;
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
      const Real ref = oracle::gmm_logdensity(beta, c, q);
      worst_density = std::max(worst_density, static_cast<double>(std::abs(lib_density - ref) /
                                                                  std::max(1.0L, std::abs(ref))));
    }
    const double expected = -0.5 * d / beta * std::log(2.0 * std::numbers::pi / beta);
    worst_spread = std::max(worst_spread, hi - lo);
    worst_const = std::max(worst_const, std::abs(0.5 * (hi + lo) - expected));
  }
  const bool pass = worst_spread < 1e-9 && worst_const < 1e-9 && worst_density < 1e-12;
  return {pass, fmt("200 instances x 10 queries; max spread of mhe + log p/b %.2e (<1e-9); "
                    "offset vs -d/(2b) log(2pi/b) %.2e; log-density vs oracle %.2e",
                    worst_spread, worst_const, worst_density)};
}

Outcome equivalences() {
  std::mt19937_64 rng(4004);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dim(2, 16), cnt(1, 32);
  std::uniform_real_distribution<double> alpha(0.05, 3.0), unit(-1.0, 1.0);
  double rbf_diff = 0, rbf_oracle = 0, svm_diff = 0, svm_oracle = 0, gap = 0;
  int agree = 0, total = 0;
  for (int i = 0; i < 1000; ++i) {
    const double beta = kBetas[static_cast<std::size_t>(i) % 3];
    const HopfieldConfig cfg{beta};
    // RBF identity on unnormalized centers.
    const int d = dim(rng);
    Mat centers(d, cnt(rng));
    for (auto& v : centers.reshaped()) v = 0.5 * g(rng);
    Vec q(d);
    for (auto& v : q) v = 0.5 * g(rng);
    const RbfCheck r = rbf_energy_check(cfg, PatternMemory(centers), q);
    rbf_diff = std::max(rbf_diff, r.diff);
    rbf_oracle = std::max(
        rbf_oracle, static_cast<double>(std::abs(r.lhs - oracle::rbf_energy(beta, centers, q))));

    // SVM duals: 6 support vectors per side plus two zero-alpha columns.
    SvmDual dual{Vec(14), {}, PatternMemory(unit_matrix(rng, 4, 14), true)};
    for (int k = 0; k < 14; ++k) {
      dual.alphas(k) = k == 6 || k == 13 ? 0.0 : alpha(rng);
      dual.targets.push_back(k < 7 ? 1 : -1);
    }
    const Vec sq = unit_vector(rng, 4);
    const SvmEquiv e = svm_score_equiv(cfg, dual, sq);
    const Real ref = oracle::svm_score(beta, dual.alphas, dual.targets, dual.patterns.data(), sq);
    svm_diff = std::max(svm_diff, e.diff);
    svm_oracle = std::max(svm_oracle, static_cast<double>(std::abs(e.direct - ref)));
    const bool same = decide(e.direct, 0.0) == decide(e.hopfield, 0.0) &&
                      (decide(e.direct, 0.0) == Decision::kId) == (ref >= 0.0L);
    agree += same;
    ++total;

    // Shifted HE against the mean dot product at β = 1e-6.
    if (i < 200) {
      Mat cls(d, cnt(rng));
      for (auto& v : cls.reshaped()) v = unit(rng);
      Vec hq(d);
      for (auto& v : hq) v = unit(rng);
      const double he = he_score(HopfieldConfig{1e-6, false}, hq, PatternMemory(cls), true);
      gap = std::max(gap, static_cast<double>(std::abs(he - oracle::mean_dot(cls, hq))));
    }
  }
  const bool pass = rbf_diff < 1e-10 && rbf_oracle < 1e-10 && svm_diff < 1e-10 &&
                    svm_oracle < 1e-10 && agree == total && gap < 1e-4;
  return {pass, fmt("RBF diff %.2e, vs oracle %.2e (<1e-10); SVM diff %.2e, vs oracle %.2e "
                    "(<1e-10), decisions agree %d/%d; shifted HE vs SHE gap %.2e (<1e-4)",
                    rbf_diff, rbf_oracle, svm_diff, svm_oracle, agree, total, gap)};
}

Outcome resampling() {
  const double beta = 8.0;
  const HopfieldConfig cfg{beta};
  const PatternMemory grid = sphere_grid(3, 2000);
  int wins_agree = 0, wins_eb = 0, lib_agree = 0, lib_eb = 0;
  double worst_weights = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SphereScene scene = gen_sphere_scene(3, 100, 400, 8.0, seed);
    const Mat& x = scene.id_pool.data();
    const Mat& o = scene.aux_pool.data();

    // Weights from the library, checked against softmax(β·E_b) of the oracle.
    const SampleWeights w = update_weights(cfg, scene.aux_pool, scene.id_pool, scene.aux_pool);
    std::vector<Real> eb(static_cast<std::size_t>(o.cols()));
    for (Eigen::Index j = 0; j < o.cols(); ++j)
      eb[static_cast<std::size_t>(j)] = oracle::boundary_energy(beta, x, o, o.col(j));
    const Real norm = oracle::lse(beta, eb);
    for (Eigen::Index j = 0; j < o.cols(); ++j) {
      const Real ref = std::exp(beta * (eb[static_cast<std::size_t>(j)] - norm));
      worst_weights =
          std::max(worst_weights, static_cast<double>(std::abs(w.weights(j) - ref) / ref));
    }

    std::mt19937_64 rng(77 + seed);
    std::uniform_int_distribution<Eigen::Index> pick_id(0, x.cols() - 1), pick_aux(0, o.cols() - 1);
    std::vector<std::size_t> ids, uni;
    for (int k = 0; k < 20; ++k) ids.push_back(static_cast<std::size_t>(pick_id(rng)));
    for (int k = 0; k < 20; ++k) uni.push_back(static_cast<std::size_t>(pick_aux(rng)));
    const std::vector<std::size_t> weighted = weighted_sample(w, 20, 1000 + seed);

    const Mat sx = scene.id_pool.select(ids).data();
    const Mat su = scene.aux_pool.select(uni).data();
    const Mat sw = scene.aux_pool.select(weighted).data();
    const double a_w = oracle::sign_agreement(beta, x, o, sx, sw, grid.data());
    const double a_u = oracle::sign_agreement(beta, x, o, sx, su, grid.data());
    Real eb_w = 0, eb_u = 0;
    for (std::size_t k : weighted) eb_w += eb[k];
    for (std::size_t k : uni) eb_u += eb[k];
    wins_agree += a_w > a_u;
    wins_eb += eb_w > eb_u;

    const ResamplingTrial t =
        resampling_trial(cfg, Geometry::kSphere, scene.id_pool, scene.aux_pool, grid, 20, seed);
    lib_agree += t.agreement_weighted > t.agreement_uniform;
    lib_eb += t.mean_eb_weighted > t.mean_eb_uniform;
  }
  const bool pass =
      wins_agree >= 18 && wins_eb == 20 && lib_agree >= 18 && lib_eb == 20 && worst_weights < 1e-9;
  return {pass, fmt("sphere d=3, pools 100/400, N=20, beta=8, 2000-point grid: weighted agreement "
                    "wins %d/20 (>=18), mean E_b wins %d/20 (=20); library trial %d/20 and %d/20; "
                    "weights vs oracle rel %.2e",
                    wins_agree, wins_eb, lib_agree, lib_eb, worst_weights)};
}

Outcome dynamics() {
  ToyPreset blobs = scene_preset(SceneKind::kBlobs);
  blobs.config.steps = 100;
  blobs.config.lr = 0.1;
  blobs.config.beta = 2.0;
  const ToyRun b = run_scene(SceneKind::kBlobs, blobs);
  const auto& first = b.trajectory.snapshots.front();
  const auto& last = b.trajectory.snapshots.back();
  const oracle::Spread s0 = oracle::planar_spread(first.id_patterns, first.aux_patterns);
  const oracle::Spread s1 = oracle::planar_spread(last.id_patterns, last.aux_patterns);
  const double orth_drop = static_cast<double>(1.0L - s1.orth / s0.orth);
  const double par_change = static_cast<double>(std::abs(s1.par / s0.par - 1.0L));

  ToyPreset sphere = scene_preset(SceneKind::kSphere);
  sphere.scene.n_id = 40;
  sphere.scene.n_aux = 40;
  sphere.scene.concentration = 4.0;
  sphere.config.full_batch = true;
  sphere.config.steps = 2500;
  sphere.config.snapshot_every = 250;
  const ToyRun s = run_scene(SceneKind::kSphere, sphere);
  std::vector<double> cross;
  for (const auto& snap : s.trajectory.snapshots)
    cross.push_back(
        static_cast<double>(oracle::cross_pair_dot(snap.id_patterns, snap.aux_patterns)));
  bool monotone = cross.size() >= 2;
  for (std::size_t i = 1; i < cross.size(); ++i) monotone = monotone && cross[i] < cross[i - 1];

  const bool pass = orth_drop >= 0.5 && par_change < 0.2 && monotone;
  return {pass, fmt("blobs 100 steps lr=0.1 beta=2: orthogonal variance -%.1f%% (>=50%%), parallel "
                    "change %.1f%% (<20%%); sphere 40/40, %zu checkpoints: cross dot %.4f -> %.4f, "
                    "%s",
                    100 * orth_drop, 100 * par_change, cross.size(), cross.front(), cross.back(),
                    monotone ? "strictly decreasing" : "NOT monotone")};
}

Outcome boundary_mc() {
  const BoundaryMcSummary lib = boundary_mc_experiment(10, 3.0, 1.0, 0.5, 50, 200, 7);
  std::mt19937_64 rng(7007);
  int wins = 0;
  double plain = 0, filt = 0;
  for (int t = 0; t < 200; ++t) {
    const oracle::McTrial tr = oracle::mc_trial(10, 3.0, 1.0, 0.5, 50, rng);
    wins += tr.margin_filtered > tr.margin_plain;
    plain += tr.margin_plain / 200;
    filt += tr.margin_filtered / 200;
  }
  return {lib.win_fraction >= 0.95,
          fmt("d=10 |mu|=3 sigma=1 eps=0.5 n=50, 200 trials: filtered margin larger in %.1f%% "
              "(>=95%%); mean margin filtered %.4f vs plain %.4f; brute-force rejection oracle: "
              "%.1f%%, %.4f vs %.4f",
              100 * lib.win_fraction, lib.mean_filtered, lib.mean_plain, 100.0 * wins / 200, filt,
              plain)};
}

Outcome metrics_oracle() {
  std::mt19937_64 rng(8008);
  std::uniform_int_distribution<int> size(1, 100), coin(0, 1), small(0, 12);
  std::normal_distribution<double> g;
  int exact = 0;
  for (int i = 0; i < 500; ++i) {
    ScoredDataset d;
    const bool ties = coin(rng) == 1;
    const auto draw = [&](double shift) { return ties ? small(rng) + shift : g(rng) + shift; };
    for (int k = size(rng); k > 0; --k) d.id_scores.push_back(draw(ties ? 2.0 : 0.5));
    for (int k = size(rng); k > 0; --k) d.ood_scores.push_back(draw(0.0));
    const std::uint64_t w2 = oracle::doubled_pair_wins(d.id_scores, d.ood_scores);
    const double ref = static_cast<double>(w2) / (2.0 * static_cast<double>(d.id_scores.size()) *
                                                  static_cast<double>(d.ood_scores.size()));
    const bool thr =
        threshold_at_tpr(d.id_scores, 0.95) == oracle::threshold_scan(d.id_scores, 19, 20);
    exact += auroc(d) == ref && thr;
  }

  std::vector<double> hundred(100);
  for (int i = 0; i < 100; ++i) hundred[static_cast<std::size_t>(i)] = i + 1;
  const std::vector<double> below{-3.0, 0.0, 0.5}, above{101.0, 150.0}, flat(9, 1.5);
  struct Hand {
    double got, want;
  };
  const std::vector<Hand> hand{
      {threshold_at_tpr(hundred, 1.0), 1.0}, {threshold_at_tpr(hundred, 0.95), 6.0},
      {threshold_at_tpr(flat, 0.3), 1.5},    {threshold_at_tpr(flat, 0.95), 1.5},
      {fpr_at_tpr({hundred, below}), 0.0},   {fpr_at_tpr({hundred, hundred}), 0.95},
      {fpr_at_tpr({hundred, above}), 1.0},   {auroc({{5.0, 6.0}, {1.0, 2.0}}), 1.0},
      {auroc({hundred, hundred}), 0.5},      {auroc({{2.0, 4.0}, {1.0, 3.0}}), 0.75},
  };
  int hand_ok = 0;
  for (const Hand& h : hand) hand_ok += h.got == h.want;
  const bool pass = exact == 500 && hand_ok == static_cast<int>(hand.size());
  return {pass, fmt("AUROC == brute-force pair count and threshold == exhaustive scan on %d/500 "
                    "datasets; hand cases exact %d/%zu",
                    exact, hand_ok, hand.size())};
}

// --- CLI driving ------------------------------------------------------------

struct Run {
  int code = -1;
  std::string output;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run cli(const fs::path& dir, const std::string& args, const std::string& env = "") {
  const fs::path log = dir / "cli_output.txt";
  const std::string cmd =
      env + " " + std::string(HB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

Outcome formats() {
  const fs::path dir = fs::current_path() / "acceptance_work";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> problems;
  const auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };

  // Binary round-trips, checked against the raw bytes of the file.
  std::mt19937_64 rng(9009);
  std::normal_distribution<double> g;
  Mat m(5, 17);
  for (auto& v : m.reshaped()) v = g(rng);
  const fs::path f64 = dir / "m64.hbem", f32 = dir / "m32.hbem";
  io::write_embeddings(f64.string(), PatternMemory(m), io::EmbFormat::kBinary, io::Dtype::kF64);
  const std::string bytes = slurp(f64);
  bool layout = bytes.size() == 24 + 5 * 17 * 8 && bytes.compare(0, 4, "HBEM") == 0;
  std::uint32_t version = 0, dtype = 0, d = 0;
  std::uint64_t n = 0;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&dtype, bytes.data() + 8, 4);
  std::memcpy(&d, bytes.data() + 12, 4);
  std::memcpy(&n, bytes.data() + 16, 8);
  layout = layout && version == 1 && dtype == 2 && d == 5 && n == 17;
  for (int j = 0; layout && j < 17; ++j)
    for (int i = 0; i < 5; ++i) {
      double v = 0;
      std::memcpy(&v, bytes.data() + 24 + 8 * (5 * j + i), 8);
      layout = layout && std::memcmp(&v, &m(i, j), 8) == 0;
    }
  expect(layout, "f64 file layout");
  const Mat back = io::read_embeddings(f64.string()).data();
  expect(std::memcmp(back.data(), m.data(), sizeof(double) * 85) == 0, "f64 round-trip");
  const Mat narrow = m.cast<float>().cast<double>();
  io::write_embeddings(f32.string(), PatternMemory(narrow), io::EmbFormat::kBinary,
                       io::Dtype::kF32);
  const Mat back32 = io::read_embeddings(f32.string()).data();
  expect(std::memcmp(back32.data(), narrow.data(), sizeof(double) * 85) == 0, "f32 round-trip");
  const fs::path f32b = dir / "m32b.hbem";
  io::write_embeddings(f32b.string(), PatternMemory(back32), io::EmbFormat::kBinary,
                       io::Dtype::kF32);
  expect(slurp(f32) == slurp(f32b), "f32 rewrite bytes");

  // Inputs for the commands.
  const fs::path id = dir / "id.hbem", aux = dir / "aux.hbem", pool = dir / "pool.hbem";
  io::write_embeddings(id.string(), PatternMemory(unit_matrix(rng, 8, 50), true),
                       io::EmbFormat::kBinary);
  io::write_embeddings(aux.string(), PatternMemory(unit_matrix(rng, 8, 60), true),
                       io::EmbFormat::kBinary);
  io::write_embeddings(pool.string(), PatternMemory(unit_matrix(rng, 8, 300), true),
                       io::EmbFormat::kBinary);
  const std::string mem = " --id-emb " + id.string() + " --aux-emb " + aux.string();

  // Every command twice with identical flags must give identical bytes.
  const auto twice = [&](const std::string& name, const std::string& args, const fs::path& out,
                         const std::string& env_a = "", const std::string& env_b = "") {
    const Run a = cli(dir, args, env_a);
    const std::string first = fs::is_directory(out) ? slurp(out / "summary.json") : slurp(out);
    const Run b = cli(dir, args, env_b);
    const std::string second = fs::is_directory(out) ? slurp(out / "summary.json") : slurp(out);
    expect(a.code == 0 && b.code == 0, name + " exit 0");
    expect(!first.empty() && first == second && a.output == b.output, name + " deterministic");
  };
  const fs::path scores = dir / "scores.csv", weights = dir / "weights.csv";
  twice("score", "score" + mem + " --query " + pool.string() + " --beta 8 --out " + scores.string(),
        scores, "HB_THREADS=1", "HB_THREADS=4");
  const fs::path id_scores = dir / "id_scores.csv";
  cli(dir, "score" + mem + " --query " + id.string() + " --out " + id_scores.string());
  const fs::path metrics = dir / "metrics.json";
  twice("eval",
        "eval --scores-id " + id_scores.string() + " --scores-ood " + scores.string() + " --out " +
            metrics.string(),
        metrics);
  twice("weights", "weights" + mem + " --pool " + pool.string() + " --out " + weights.string(),
        weights, "HB_THREADS=1", "HB_THREADS=3");
  const fs::path draws = dir / "draws.csv";
  twice("sample",
        "sample --weights " + weights.string() + " --n 500 --seed 42 --out " + draws.string(),
        draws);
  const fs::path toy = dir / "toy";
  twice("toy", "toy sphere --steps 60 --snapshot-every 20 --seed 5 --out-dir " + toy.string(), toy);
  const fs::path verify_log = dir / "cli_output.txt";
  twice("verify", "verify identities --seed 3", verify_log);

  // Exit codes.
  const auto code = [&](const std::string& args, int want, const std::string& what) {
    const Run r = cli(dir, args);
    expect(r.code == want, fmt("%s: exit %d, want %d", what.c_str(), r.code, want));
    return r;
  };
  const Run missing =
      code("score --id-emb " + (dir / "missing.hbem").string() + " --aux-emb " + aux.string() +
               " --query " + pool.string() + " --out " + (dir / "x.csv").string(),
           2, "missing file");
  expect(missing.output.find("missing.hbem") != std::string::npos, "missing file names the path");
  const fs::path bad = dir / "bad.hbem";
  std::ofstream(bad, std::ios::binary) << "NOPE0000000000000000000000000000";
  code("score --id-emb " + bad.string() + " --aux-emb " + aux.string() + " --query " +
           pool.string() + " --out " + (dir / "x.csv").string(),
       2, "bad magic");
  code("verify no-such-suite", 1, "unknown suite");
  code("verify rbf --tol 0", 3, "verify --tol 0");
  code("verify rbf", 0, "verify rbf");
  code("score --bogus-flag", 1, "bad flag");
  code("toy torus", 1, "unknown scene");
  code("toy blobs --beta -2", 2, "out-of-range config");

  std::string detail =
      "binary f64/f32 round-trips bit-exact; score/eval/weights/sample/toy/verify "
      "repeatable (score/weights across HB_THREADS); exit codes 0/1/2/3 as "
      "documented";
  if (!problems.empty()) {
    detail = "problems:";
    for (const auto& p : problems) detail += " [" + p + "]";
  }
  return {problems.empty(), detail};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hopboost acceptance checks"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"energy identities", identities},
      {"analytic gradients vs finite differences", gradients},
      {"mixture-density oracle", mixture},
      {"RBF / SVM / HE-SHE equivalences", equivalences},
      {"weighted resampling (Figure-2 proxy)", resampling},
      {"toy pattern dynamics", dynamics},
      {"boundary-filter Monte-Carlo", boundary_mc},
      {"metrics oracle", metrics_oracle},
      {"formats and CLI", formats},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %zu %s: %s -- %s\n", i + 1, criteria[i].title,
                out.pass ? "PASS" : "FAIL", out.detail.c_str());
    std::fflush(stdout);
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
