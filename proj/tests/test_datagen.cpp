#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "ddlab/datagen.hpp"

using namespace ddlab;

namespace {

double sample_var(const Vector& v) {
  double m = v.mean();
  return (v.array() - m).square().sum() / double(v.size() - 1);
}

}  // namespace

TEST_CASE("sample_design: shape and mean shift") {
  RngStream rng(1, 0);
  DesignSpec spec;
  spec.mu = 5.0;
  Matrix x = sample_design(rng, 100000, 4, spec);
  REQUIRE(x.rows() == 100000);
  REQUIRE(x.cols() == 4);
  for (Index j = 0; j < 4; ++j)
    CHECK(x.col(j).mean() == doctest::Approx(5.0).epsilon(0.01));
}

TEST_CASE("sample_design: independent entries are uncorrelated, unit variance") {
  RngStream rng(2, 0);
  Matrix x = sample_design(rng, 100000, 3, DesignSpec{});
  Matrix centered = x.rowwise() - x.colwise().mean();
  Matrix cov = centered.transpose() * centered / double(x.rows() - 1);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      CHECK(cov(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(0.02).scale(1.0));
}

TEST_CASE("sample_design: spiked covariance adds rho to every pair") {
  RngStream rng(3, 0);
  DesignSpec spec;
  spec.kind = DesignKind::spiked;
  spec.rho = 0.25;
  Matrix x = sample_design(rng, 100000, 3, spec);
  Matrix centered = x.rowwise() - x.colwise().mean();
  Matrix cov = centered.transpose() * centered / double(x.rows() - 1);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      double want = (i == j) ? 1.25 : 0.25;
      CHECK(cov(i, j) == doctest::Approx(want).epsilon(0.02).scale(1.0));
    }
}

TEST_CASE("sample_design: spiked with rho=0 equals independent draws") {
  RngStream a(9, 9), b(9, 9);
  DesignSpec spiked0;
  spiked0.kind = DesignKind::spiked;
  spiked0.rho = 0.0;
  Matrix xs = sample_design(a, 40, 6, spiked0);
  Matrix xi = sample_design(b, 40, 6, DesignSpec{});
  CHECK(xs == xi);
}

TEST_CASE("sample_beta: gaussian law puts exactly s nonzeros") {
  RngStream rng(4, 0);
  BetaSpec spec;  // gaussian, s=20
  Vector beta = sample_beta(rng, 100, spec);
  REQUIRE(beta.size() == 100);
  Index nonzero = (beta.array() != 0.0).count();
  CHECK(nonzero == 20);
}

TEST_CASE("sample_beta: uniform law draws active entries in [1,2]") {
  RngStream rng(5, 0);
  BetaSpec spec;
  spec.law = BetaLaw::uniform;
  Vector beta = sample_beta(rng, 60, spec);
  int active = 0;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) == 0.0) continue;
    ++active;
    CHECK(beta(j) >= 1.0);
    CHECK(beta(j) < 2.0);
  }
  CHECK(active == 20);
}

TEST_CASE("sample_beta: p below the support size keeps every entry active") {
  RngStream rng(6, 0);
  BetaSpec spec;
  spec.law = BetaLaw::uniform;
  Vector beta = sample_beta(rng, 7, spec);
  REQUIRE(beta.size() == 7);
  for (Index j = 0; j < 7; ++j) CHECK(beta(j) >= 1.0);
}

TEST_CASE("calibrate_noise: sigma^2 = Var(signal)/snr") {
  Vector signal(2);
  signal << 0.0, 2.0;  // sample variance 2
  CHECK(calibrate_noise(signal, 0.5) == doctest::Approx(2.0));
  Vector s4(4);
  s4 << -2.0, 2.0, -2.0, 2.0;  // sample variance 16/3
  CHECK(calibrate_noise(s4, 2.0) == doctest::Approx(std::sqrt(16.0 / 3.0 / 2.0)));
  CHECK_THROWS_AS(calibrate_noise(Vector::Ones(5), 5.0), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_noise(signal, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_noise(signal, -1.0), std::invalid_argument);
}

TEST_CASE("contaminate: response shifts hit floor(r*n) training rows") {
  RngStream gen(7, 0);
  DataSpec spec;
  spec.n_train = 50;
  spec.n_test = 50;
  spec.p = 30;
  Dataset clean = generate_dataset(gen, spec);

  RngStream crng(8, 0);
  ContaminationSpec cs;
  cs.kind = ContaminationKind::y_additive;
  cs.fraction = 0.1;
  cs.magnitude = 100.0;
  Dataset dirty = contaminate(crng, clean, cs);

  REQUIRE(dirty.contaminated_rows.size() == 5);
  CHECK(std::is_sorted(dirty.contaminated_rows.begin(), dirty.contaminated_rows.end()));
  std::set<Index> hit(dirty.contaminated_rows.begin(), dirty.contaminated_rows.end());
  for (Index i = 0; i < 50; ++i) {
    double delta = dirty.y_train(i) - clean.y_train(i);
    if (hit.count(i))
      CHECK(delta == doctest::Approx(100.0));
    else
      CHECK(delta == 0.0);
  }
  CHECK(dirty.x_train == clean.x_train);
  CHECK(dirty.y_test == clean.y_test);
  CHECK(dirty.x_test == clean.x_test);
}

TEST_CASE("contaminate: fraction too small to reach one row is a no-op") {
  RngStream gen(10, 0);
  DataSpec spec;
  spec.n_train = 9;
  spec.n_test = 5;
  spec.p = 3;
  Dataset clean = generate_dataset(gen, spec);
  RngStream crng(11, 0);
  ContaminationSpec cs;
  cs.kind = ContaminationKind::y_additive;
  cs.fraction = 0.1;  // floor(0.9) = 0 rows
  Dataset out = contaminate(crng, clean, cs);
  CHECK(out.contaminated_rows.empty());
  CHECK(out.y_train == clean.y_train);
}

TEST_CASE("contaminate: predictor cells shift in the chosen rows") {
  RngStream gen(12, 0);
  DataSpec spec;
  spec.n_train = 20;
  spec.n_test = 5;
  spec.p = 30;
  Dataset clean = generate_dataset(gen, spec);
  RngStream crng(13, 0);
  ContaminationSpec cs;
  cs.kind = ContaminationKind::x_rowwise;
  cs.fraction = 0.25;
  cs.magnitude = 100.0;
  Dataset dirty = contaminate(crng, clean, cs);

  REQUIRE(dirty.contaminated_rows.size() == 5);
  CHECK(dirty.cells_per_row == 3);  // floor(0.1 * 30)
  std::set<Index> hit(dirty.contaminated_rows.begin(), dirty.contaminated_rows.end());
  for (Index i = 0; i < 20; ++i) {
    int changed = 0;
    for (Index j = 0; j < 30; ++j) {
      double delta = dirty.x_train(i, j) - clean.x_train(i, j);
      if (delta != 0.0) {
        ++changed;
        CHECK(delta == doctest::Approx(100.0));
      }
    }
    CHECK(changed == (hit.count(i) ? 3 : 0));
  }
  CHECK(dirty.y_train == clean.y_train);
}

TEST_CASE("contaminate: cell count clamps to one column when p is tiny") {
  RngStream gen(14, 0);
  DataSpec spec;
  spec.n_train = 20;
  spec.n_test = 5;
  spec.p = 5;
  Dataset clean = generate_dataset(gen, spec);
  RngStream crng(15, 0);
  ContaminationSpec cs;
  cs.kind = ContaminationKind::x_rowwise;
  cs.fraction = 0.2;
  Dataset dirty = contaminate(crng, clean, cs);
  CHECK(dirty.cells_per_row == 1);  // max(1, floor(0.5))
  REQUIRE(dirty.contaminated_rows.size() == 4);
}

TEST_CASE("contaminate: rejects the none kind and bad fractions") {
  RngStream gen(16, 0);
  DataSpec spec;
  spec.n_train = 10;
  spec.n_test = 5;
  spec.p = 2;
  Dataset clean = generate_dataset(gen, spec);
  RngStream crng(17, 0);
  ContaminationSpec none;
  CHECK_THROWS_AS(contaminate(crng, clean, none), std::invalid_argument);
  ContaminationSpec bad;
  bad.kind = ContaminationKind::y_additive;
  bad.fraction = 1.0;
  CHECK_THROWS_AS(contaminate(crng, clean, bad), std::invalid_argument);
}

TEST_CASE("generate_dataset: shapes, sigma, and the SNR identity") {
  RngStream rng(18, 0);
  DataSpec spec;
  spec.n_train = 40;
  spec.n_test = 60;
  spec.p = 25;
  spec.snr = 5.0;
  Dataset d = generate_dataset(rng, spec);
  REQUIRE(d.x_train.rows() == 40);
  REQUIRE(d.x_train.cols() == 25);
  REQUIRE(d.x_test.rows() == 60);
  REQUIRE(d.x_test.cols() == 25);
  REQUIRE(d.y_train.size() == 40);
  REQUIRE(d.y_test.size() == 60);
  REQUIRE(d.beta_true.size() == 25);
  CHECK(d.sigma > 0.0);
  CHECK(d.contaminated_rows.empty());

  // With p >= s no columns are dropped, so the generating signal is exactly
  // X beta and sigma must satisfy Var(X beta) / sigma^2 = snr on the pooled
  // train+test rows.
  Vector signal(100);
  signal.head(40) = d.x_train * d.beta_true;
  signal.tail(60) = d.x_test * d.beta_true;
  CHECK(sample_var(signal) / (d.sigma * d.sigma) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("generate_dataset: p below the support size drops model columns") {
  RngStream rng(19, 0);
  DataSpec spec;
  spec.n_train = 30;
  spec.n_test = 10;
  spec.p = 5;  // model is built with s=20 columns, 5 survive
  Dataset d = generate_dataset(rng, spec);
  REQUIRE(d.x_train.cols() == 5);
  REQUIRE(d.beta_true.size() == 5);
  // The retained columns came from a generating model with more predictors,
  // so y generally does not equal X beta + noise in the retained coordinates;
  // all we require is finiteness and a positive noise level.
  CHECK(d.y_train.allFinite());
  CHECK(d.sigma > 0.0);
}

TEST_CASE("generate_dataset: same stream state reproduces bit-identically") {
  DataSpec spec;
  spec.n_train = 25;
  spec.n_test = 15;
  spec.p = 60;
  spec.design.kind = DesignKind::spiked;
  spec.contamination.kind = ContaminationKind::y_additive;
  spec.contamination.fraction = 0.2;
  RngStream a(21, 4), b(21, 4);
  Dataset da = generate_dataset(a, spec);
  Dataset db = generate_dataset(b, spec);
  CHECK(da.x_train == db.x_train);
  CHECK(da.y_train == db.y_train);
  CHECK(da.x_test == db.x_test);
  CHECK(da.y_test == db.y_test);
  CHECK(da.beta_true == db.beta_true);
  CHECK(da.sigma == db.sigma);
  CHECK(da.contaminated_rows == db.contaminated_rows);
}

TEST_CASE("generate_dataset: contamination only perturbs flagged training responses") {
  DataSpec dirty_spec;
  dirty_spec.n_train = 50;
  dirty_spec.n_test = 50;
  dirty_spec.p = 30;
  dirty_spec.contamination.kind = ContaminationKind::y_additive;
  dirty_spec.contamination.fraction = 0.3;
  dirty_spec.contamination.magnitude = 100.0;
  DataSpec clean_spec = dirty_spec;
  clean_spec.contamination = ContaminationSpec{};

  RngStream a(22, 0), b(22, 0);
  Dataset dirty = generate_dataset(a, dirty_spec);
  Dataset clean = generate_dataset(b, clean_spec);

  CHECK(dirty.x_train == clean.x_train);
  CHECK(dirty.x_test == clean.x_test);
  CHECK(dirty.y_test == clean.y_test);
  REQUIRE(dirty.contaminated_rows.size() == 15);
  std::set<Index> hit(dirty.contaminated_rows.begin(), dirty.contaminated_rows.end());
  for (Index i = 0; i < 50; ++i) {
    double delta = dirty.y_train(i) - clean.y_train(i);
    CHECK(delta == (hit.count(i) ? doctest::Approx(100.0) : doctest::Approx(0.0)));
  }
}

TEST_CASE("generate_dataset: rejects degenerate sizes") {
  RngStream rng(23, 0);
  DataSpec bad;
  bad.n_train = 0;
  CHECK_THROWS_AS(generate_dataset(rng, bad), std::invalid_argument);
  DataSpec badp;
  badp.p = 0;
  CHECK_THROWS_AS(generate_dataset(rng, badp), std::invalid_argument);
}
