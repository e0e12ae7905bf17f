#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hopboost/energy.hpp"

using namespace hopboost;

namespace {

// Direct summation in extended precision, no max shift.
long double lse_oracle(long double beta, const std::vector<double>& z) {
  long double s = 0.0L;
  for (double v : z) s += std::exp(beta * static_cast<long double>(v));
  return std::log(s) / beta;
}

Eigen::MatrixXd unit_matrix(std::mt19937_64& rng, int d, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(d, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) m(i, j) = g(rng);
    m.col(j).normalize();
  }
  return m;
}

PatternMemory unit_memory(std::mt19937_64& rng, int d, int n) {
  return PatternMemory(unit_matrix(rng, d, n), true);
}

Vector unit_vector(std::mt19937_64& rng, int d) { return unit_matrix(rng, d, 1).col(0); }

}  // namespace

TEST_CASE("lse matches hand values and the direct-summation oracle") {
  CHECK(lse(HopfieldConfig{7.0}, std::vector<double>{3.25}) == doctest::Approx(3.25).epsilon(1e-15));
  CHECK(lse(HopfieldConfig{1.0}, std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  const std::vector<double> z{1.0, 2.0, 3.0};
  CHECK(std::abs(lse(HopfieldConfig{2.0}, z) - static_cast<double>(lse_oracle(2.0L, z))) < 1e-14);
}

TEST_CASE("lse stays within its bounds and does not overflow") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (double beta : {0.5, 4.0, 1e4}) {
    std::vector<double> z(17);
    for (auto& v : z) v = g(rng) * 100.0;
    const double m = *std::max_element(z.begin(), z.end());
    const double l = lse(HopfieldConfig{beta}, z);
    CHECK(l >= m);
    CHECK(l <= m + std::log(17.0) / beta + 1e-12);
  }
  const std::vector<double> huge{1e6, 1e6 - 1.0};
  CHECK(std::isfinite(lse(HopfieldConfig{1.0}, huge)));
}

TEST_CASE("lse and softmax reject empty and non-finite input") {
  const HopfieldConfig cfg;
  try {
    lse(cfg, std::vector<double>{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyInput);
    CHECK(exit_code(e.code()) == 1);
  }
  try {
    softmax(cfg, std::vector<double>{1.0, NAN});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFinite);
    CHECK(exit_code(e.code()) == 2);
  }
  CHECK_THROWS_AS(lse(HopfieldConfig{-1.0}, std::vector<double>{1.0}), Error);
}

TEST_CASE("softmax hand cases and simplex at extreme magnitudes") {
  const Vector u = softmax(HopfieldConfig{3.0}, std::vector<double>{2.0, 2.0, 2.0});
  for (int i = 0; i < 3; ++i) CHECK(u(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const Vector s = softmax(HopfieldConfig{1.0}, std::vector<double>{0.0, std::log(3.0)});
  CHECK(s(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(s(1) == doctest::Approx(0.75).epsilon(1e-14));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (double beta : {0.5, 4.0, 32.0}) {
    std::vector<double> z(40);
    for (auto& v : z) v = g(rng) * 1e4 * beta;
    const Vector p = softmax(HopfieldConfig{beta}, z);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
  }
  std::vector<double> z(9);
  for (auto& v : z) v = g(rng);
  const Vector p = softmax(HopfieldConfig{2.0}, z);
  long double denom = 0.0L;
  for (double v : z) denom += std::exp(2.0L * v);
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(std::abs(p(static_cast<Eigen::Index>(i)) -
                   static_cast<double>(std::exp(2.0L * z[i]) / denom)) < 1e-12);
}

TEST_CASE("mhe hand cases") {
  const HopfieldConfig cfg{4.0};
  Vector x(3);
  x << 0.0, 1.0, 0.0;
  const PatternMemory mem(x, true);
  CHECK(std::abs(mhe(cfg, x, mem)) < 1e-15);
  Vector perp(3);
  perp << 1.0, 0.0, 0.0;
  CHECK(mhe(cfg, perp, mem) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mhe differs from the mixture log-density by a query-independent constant") {
  std::mt19937_64 rng(3);
  for (double beta : {0.5, 4.0, 32.0}) {
    const HopfieldConfig cfg{beta};
    const PatternMemory mem = unit_memory(rng, 6, 12);
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < 10; ++k) {
      const Vector q = unit_vector(rng, 6);
      const double c = mhe(cfg, q, mem) + gaussian_mixture_logdensity(cfg, q, mem) / beta;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CHECK(hi - lo < 1e-9);
  }
}

TEST_CASE("gaussian mixture hand cases") {
  Vector c(1);
  c << 0.3;
  const HopfieldConfig cfg{1.0, false};
  CHECK(gaussian_mixture_logdensity(cfg, c, PatternMemory(c)) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-14));
  Eigen::MatrixXd two(1, 2);
  two << 0.3, 0.3;
  Vector q(1);
  q << -0.4;
  CHECK(gaussian_mixture_logdensity(cfg, q, PatternMemory(two)) ==
        doctest::Approx(gaussian_mixture_logdensity(cfg, q, PatternMemory(c))).epsilon(1e-14));
}

TEST_CASE("boundary energy: identical memories sit at the maximum") {
  std::mt19937_64 rng(4);
  const PatternMemory x = unit_memory(rng, 5, 7);
  const Vector q = unit_vector(rng, 5);
  for (double beta : {0.5, 4.0, 32.0}) {
    const HopfieldConfig cfg{beta};
    const double top = -2.0 * std::numbers::ln2 / beta;
    CHECK(std::abs(boundary_energy(cfg, q, x, x) - top) < 1e-12);
    CHECK(std::abs(boundary_energy_logcosh(cfg, q, x, x) - top) < 1e-15);
    CHECK(score(cfg, q, x, x) == 0.0);
    const Posterior p = posterior_pair(cfg, q, x, x);
    CHECK(p.p_id == 0.5);
    CHECK(p.p_aux == 0.5);
  }
}

TEST_CASE("boundary energy identities on random instances") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const double beta = (k % 3 == 0) ? 0.5 : (k % 3 == 1 ? 4.0 : 32.0);
    const HopfieldConfig cfg{beta};
    const int d = 2 + k % 15;
    const PatternMemory x = unit_memory(rng, d, 1 + k % 32);
    const PatternMemory o = unit_memory(rng, d, 1 + (k * 7) % 32);
    const Vector q = unit_vector(rng, d);
    const double eb = boundary_energy(cfg, q, x, o);
    CHECK(std::abs(eb - boundary_energy_logcosh(cfg, q, x, o)) < 1e-9);
    CHECK(eb <= -2.0 * std::numbers::ln2 / beta + 1e-9);
    const Posterior p = posterior_pair(cfg, q, x, o);
    CHECK(p.p_id + p.p_aux == 1.0);
    CHECK(std::abs(std::exp(beta * eb) - p.p_id * p.p_aux) < 1e-10);
    const double s = score(cfg, q, x, o);
    CHECK(std::abs(s - (std::log(p.p_id) - std::log(p.p_aux)) / beta) < 1e-10);
    CHECK((s >= 0.0) == (p.p_id >= 0.5));
    // recomputation from two independent lse calls
    std::vector<double> zx(static_cast<std::size_t>(x.count())), zo(static_cast<std::size_t>(o.count()));
    for (Eigen::Index i = 0; i < x.count(); ++i) zx[static_cast<std::size_t>(i)] = x.column(i).dot(q);
    for (Eigen::Index i = 0; i < o.count(); ++i) zo[static_cast<std::size_t>(i)] = o.column(i).dot(q);
    CHECK(std::abs(s - (lse(cfg, zx) - lse(cfg, zo))) < 1e-12);
  }
}

TEST_CASE("log-cosh form follows the asymptote for large lse gaps") {
  // log cosh(a) -> |a| − log 2
  for (double a : {40.0, 100.0, 1e6})
    CHECK(std::abs(log_cosh(a) - (a - std::numbers::ln2)) <= 1e-9 * a);
  CHECK(log_cosh(0.0) == 0.0);
  CHECK(log_cosh(-50.0) == log_cosh(50.0));
}

TEST_CASE("batch operations match the scalar loop and are equivariant") {
  std::mt19937_64 rng(6);
  const HopfieldConfig cfg{4.0};
  const PatternMemory x = unit_memory(rng, 4, 9);
  const PatternMemory o = unit_memory(rng, 4, 11);
  const PatternMemory joint = PatternMemory::concat(x, o);
  const Vector e = boundary_energy_batch(cfg, joint, x, o);
  REQUIRE(e.size() == 20);
  for (Eigen::Index i = 0; i < joint.count(); ++i)
    CHECK(e(i) == boundary_energy(cfg, joint.column(i), x, o));
  std::vector<std::size_t> perm{3, 0, 19, 7};
  const Vector ep = boundary_energy_batch(cfg, joint.select(perm), x, o);
  for (std::size_t k = 0; k < perm.size(); ++k)
    CHECK(ep(static_cast<Eigen::Index>(k)) == e(static_cast<Eigen::Index>(perm[k])));
  const PatternMemory one = joint.select(std::vector<std::size_t>{5});
  CHECK(score_batch(cfg, one, x, o)(0) == score(cfg, joint.column(5), x, o));
}

TEST_CASE("validation of dimensions and normalization") {
  std::mt19937_64 rng(7);
  const HopfieldConfig cfg{4.0};
  const PatternMemory x = unit_memory(rng, 4, 3);
  const PatternMemory y = unit_memory(rng, 5, 3);
  try {
    boundary_energy(cfg, unit_vector(rng, 4), x, y);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  const PatternMemory raw(2.0 * x.data());
  CHECK_FALSE(raw.normalized());
  try {
    score(cfg, unit_vector(rng, 4), raw, x);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotNormalized);
  }
  CHECK_NOTHROW(score(HopfieldConfig{4.0, false}, unit_vector(rng, 4), raw, x));
  CHECK_THROWS_AS(PatternMemory(2.0 * x.data(), true), Error);
  CHECK(PatternMemory::detect(x.data()).normalized());
}

TEST_CASE("euclidean lse") {
  std::mt19937_64 rng(8);
  const HopfieldConfig cfg{3.0, false};
  const Vector q = unit_vector(rng, 4);
  CHECK(std::abs(euclidean_lse(cfg, q, PatternMemory(q))) < 1e-15);
  const PatternMemory x = unit_memory(rng, 4, 6);
  std::vector<double> dots(6);
  for (int i = 0; i < 6; ++i) dots[static_cast<std::size_t>(i)] = x.column(i).dot(q);
  CHECK(std::abs(euclidean_lse(cfg, q, x) - (lse(cfg, dots) - 0.5 * q.squaredNorm() - 0.5)) < 1e-12);
  long double s = 0.0L;
  for (int i = 0; i < 6; ++i)
    s += std::exp(-1.5L * static_cast<long double>((q - x.column(i)).squaredNorm()));
  CHECK(std::abs(euclidean_lse(cfg, q, x) - static_cast<double>(std::log(s) / 3.0L)) < 1e-14);
}

TEST_CASE("normalize_columns") {
  Eigen::MatrixXd m(2, 2);
  m << 3.0, 1.0, 4.0, 0.0;
  const PatternMemory n = normalize_columns(m);
  CHECK(n.normalized());
  CHECK(n.data()(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(n.data()(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(n.data()(0, 1) == 1.0);
  const PatternMemory twice = normalize_columns(n.data());
  CHECK((twice.data() - n.data()).cwiseAbs().maxCoeff() <= 1e-15);
  Eigen::MatrixXd z(2, 2);
  z << 1.0, 0.0, 0.0, 0.0;
  try {
    normalize_columns(z);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroNorm);
    CHECK(std::string(e.what()).find("column 1") != std::string::npos);
  }
}

TEST_CASE("decide is inclusive at the threshold") {
  CHECK(decide(0.0, 0.0) == Decision::kId);
  CHECK(decide(-1.0, 0.0) == Decision::kOod);
}
