#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rho/affinity.hpp"
#include "rho/models.hpp"
#include "rho/random.hpp"
#include "rho/simulate.hpp"

using namespace rho;

TEST_CASE("baseline estimators") {
  Eigen::VectorXd v(3);
  v << 1.0, 2.0, 3.0;
  const Sample X = Sample::reals(v);
  CHECK(empirical_mean(X) == doctest::Approx(2.0));
  CHECK(empirical_median(X) == 2.0);  // odd n: X_((n+1)/2)
  CHECK(midrange(X) == doctest::Approx(2.0));

  Eigen::VectorXd w(4);
  w << 10.0, 1.0, 3.0, 2.0;
  CHECK(empirical_median(Sample::reals(w)) == 2.0);  // even n: X_(n/2)

  SUBCASE("histogram frequencies") {
    Eigen::VectorXd data(10);
    data << 0.5, 0.5, 0.5, 0.5, 0.5, 1.5, 1.5, 1.5, 2.5, 2.5;
    const Eigen::VectorXd freq = histogram_mle(Sample::reals(data), {0.0, 1.0, 2.0, 3.0});
    CHECK(freq[0] == doctest::Approx(0.5));
    CHECK(freq[1] == doctest::Approx(0.3));
    CHECK(freq[2] == doctest::Approx(0.2));
  }

  SUBCASE("least squares on noiseless data") {
    const int n = 11;
    const Eigen::VectorXd x = affine_design(n);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = 0.7 - 1.3 * x[i];
    const Eigen::Vector2d ab = least_squares_affine(Sample::reals(y), x);
    CHECK(ab[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(ab[1] == doctest::Approx(-1.3).epsilon(1e-12));
  }

  SUBCASE("grid mle flags an unbounded likelihood instead of throwing") {
    const auto q = std::make_shared<InvSqrtDensity>(0.0);
    const ModelNet net = make_translation_net(q, -1.0, 1.0, 0.5, 3);
    Eigen::VectorXd data(3);
    data << 0.5, -0.2, 0.3;  // 0.5 sits exactly on a grid translate
    const MleGridResult res = mle_grid(Sample::reals(data), net);
    CHECK(!res.defined);
    // while a well-behaved family picks the likelihood maximizer
    const auto g = std::make_shared<GaussianDensity>(0.0, 1.0);
    const ModelNet gnet = make_translation_net(g, -1.0, 1.0, 0.01, 3);
    const MleGridResult gres = mle_grid(Sample::reals(data), gnet);
    CHECK(gres.defined);
    CHECK(gnet.params[gres.index][0] == doctest::Approx(0.2).epsilon(1e-9));
  }
}

TEST_CASE("scenario runs are deterministic given the seed") {
  Scenario sc;
  sc.name = "det";
  sc.family = "translation";
  sc.error = "gauss";
  sc.grid_min = -0.3;
  sc.grid_max = 0.3;
  sc.grid_step = 0.01;
  sc.ns = {20, 40};
  sc.replications = 40;
  sc.seed = 7;
  sc.estimators = {"rho", "mean", "median", "mle_grid"};
  sc.threads = 2;

  const RiskReport a = run_scenario(sc);
  sc.threads = 1;  // worker count must not change the numbers
  const RiskReport b = run_scenario(sc);
  CHECK(a.to_csv() == b.to_csv());

  // fixed column order
  CHECK(a.to_csv().rfind("scenario,estimator,n,replications,loss_name,mean,std_err,q05,q50,q95\n",
                         0) == 0);
  const RiskRow* row = a.find("mean", "sq_err", 40);
  REQUIRE(row != nullptr);
  CHECK(row->replications == 40);
  CHECK(row->mean > 0.0);
  // agreement column appears when both rho and mle_grid run
  CHECK(a.find("rho", "mle_agreement", 20) != nullptr);
}

TEST_CASE("sequence scenario: risk scales like 1/n with a stable constant") {
  Scenario sc;
  sc.name = "seq";
  sc.family = "sequence";
  sc.ns = {25, 50, 100};
  sc.replications = 150;
  sc.seed = 11;
  sc.estimators = {"rho"};

  const RiskReport rep = run_scenario(sc);
  double lo = 1e9, hi = -1e9;
  for (int n : sc.ns) {
    const RiskRow* row = rep.find("rho", "hellinger_sq", n);
    REQUIRE(row != nullptr);
    const double scaled = row->mean * n;
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    // the criterion value of the estimate is identically zero
    const RiskRow* ups = rep.find("rho", "upsilon_min", n);
    REQUIRE(ups != nullptr);
    CHECK(ups->mean == 0.0);
    CHECK(ups->q95 == 0.0);
  }
  CHECK(hi / lo < 2.5);  // fitted constant is stable across n
}

TEST_CASE("histogram scenario matches the frequency estimator closely") {
  Scenario sc;
  sc.name = "hist";
  sc.family = "histogram";
  Eigen::VectorXd m(3);
  m << 0.5, 0.3, 0.2;
  sc.true_masses = m;
  sc.edges = {0.0, 1.0, 2.0, 3.0};
  sc.resolution = 60;
  sc.ns = {25};
  sc.replications = 25;
  sc.seed = 3;
  sc.estimators = {"rho", "histogram_mle"};

  const RiskReport rep = run_scenario(sc);
  const RiskRow* rho_row = rep.find("rho", "hellinger_sq", 25);
  const RiskRow* mle_row = rep.find("histogram_mle", "hellinger_sq", 25);
  REQUIRE(rho_row != nullptr);
  REQUIRE(mle_row != nullptr);
  // within a grid step of each other on average
  CHECK(std::fabs(rho_row->mean - mle_row->mean) < 2.0 / 60);
}

TEST_CASE("inequality suite passes on a reduced budget") {
  const InequalityReport rep = verify_inequalities(20240801, 2000, 2);
  for (const auto& c : rep.checks) {
    INFO(c.name, " margin ", c.worst_margin, " at ", c.detail);
    CHECK(c.pass);
  }
  CHECK(rep.all_pass());
  CHECK(rep.checks.size() >= 6);
}

TEST_CASE("w-process diagnostic") {
  const std::vector<int> theta = {1, 0, 1, 1, 0, 1, 0, 1, 1, 0};
  const DensityPtr s_coord = make_sequence_truth(theta, 2, 60);
  const int n = 20;
  RandomStream rng(5, 0);
  std::vector<Obs> obs(n);
  for (int i = 0; i < n; ++i) obs[i] = s_coord->sample(rng);
  const Sample X(std::move(obs));
  const ModelNet net = make_sequence_net(X, 2, 60, n);
  const ProductDensity s = ProductDensity::iid(s_coord, n);

  SUBCASE("empty ball gives zero") {
    // shift the center far away so h2(s, s_bar) alone exceeds y^2
    const DensityPtr far = make_sequence_truth({0, 1}, 2, 60);
    const ProductDensity s_bar = ProductDensity::iid(far, n);
    CHECK(estimate_wS(s, s_bar, net, 0.5, 50, 17) == 0.0);
  }

  SUBCASE("singleton ball centered at the truth gives zero") {
    ModelNet self;
    self.points.push_back(s);
    CHECK(estimate_wS(s, s, self, 1.0, 50, 17) == 0.0);
  }

  SUBCASE("sequence bound 2(2 sqrt 2 + n^2 h^2) y") {
    const ProductDensity s_bar = s;  // h2(s, s_bar) = 0
    for (double y : {1.0, 1.5, 2.0}) {
      const double w = estimate_wS(s, s_bar, net, y, 400, 17);
      CHECK(w <= 2.0 * (2.0 * std::sqrt(2.0) + 0.0) * y);
      CHECK(w >= 0.0);
    }
  }
}

TEST_CASE("random-design regression end to end") {
  // y = f(w) + eps with f(w) = 0.4 + 0.8 w, eps gaussian, w uniform on [0,1]
  const auto q = std::make_shared<rho::GaussianDensity>(0.0, 1.0);
  auto w_sampler = [](rho::RandomStream& rng) { return rng.uniform01(); };
  std::vector<std::function<double(double)>> basis = {[](double) { return 1.0; },
                                                      [](double w) { return w; }};
  const Eigen::VectorXd a_grid = Eigen::VectorXd::LinSpaced(9, 0.0, 0.8);
  const Eigen::VectorXd b_grid = Eigen::VectorXd::LinSpaced(9, 0.4, 1.2);
  const int n = 150;
  const rho::ModelNet net = rho::make_random_design_net(q, basis, {a_grid, b_grid}, n,
                                                        nullptr, w_sampler);

  rho::RandomStream rng(31337, 0);
  std::vector<rho::Obs> obs(n);
  for (int i = 0; i < n; ++i) {
    const double w = rng.uniform01();
    obs[i] = rho::Obs::wy(w, 0.4 + 0.8 * w + rng.normal());
  }
  const rho::Sample X(std::move(obs));

  const rho::EstimateResult res = rho::rho_estimate(X, net, {});
  const Eigen::VectorXd ab = net.params[res.index];
  // within a couple of grid steps of the truth at this n
  CHECK(std::fabs(ab[0] - 0.4) <= 0.31);
  CHECK(std::fabs(ab[1] - 0.8) <= 0.31);

  // the random-design loss of the estimate is small and computable without nu
  const double loss = rho::random_design_hellinger_sq(
      *q, [](double w) { return 0.4 + 0.8 * w; },
      [&](double w) { return ab[0] + ab[1] * w; });
  CHECK(loss < 0.02);
}


TEST_CASE("baseline dispatcher") {
  using rho::BaselineKind;
  Eigen::VectorXd v(5);
  v << 0.2, -0.4, 0.9, 0.1, 0.0;
  const rho::Sample X = rho::Sample::reals(v);
  CHECK(rho::baseline_estimate(BaselineKind::Mean, X).scalar ==
        doctest::Approx(v.mean()));
  CHECK(rho::baseline_estimate(BaselineKind::Median, X).scalar == 0.1);
  CHECK(rho::baseline_estimate(BaselineKind::Midrange, X).scalar ==
        doctest::Approx(0.25));
  CHECK_THROWS_AS(rho::baseline_estimate(BaselineKind::MleGrid, X), std::invalid_argument);

  const auto q = std::make_shared<rho::GaussianDensity>(0.0, 1.0);
  const rho::ModelNet net = rho::make_translation_net(q, -1.0, 1.0, 0.05, 5);
  rho::BaselineInputs inputs;
  inputs.net = &net;
  const rho::BaselineEstimate mle = rho::baseline_estimate(BaselineKind::MleGrid, X, inputs);
  CHECK(mle.defined);
  CHECK(mle.scalar == doctest::Approx(v.mean()).epsilon(0.2));

  const std::vector<double> edges = {-1.0, 0.0, 1.0};
  rho::BaselineInputs hs;
  hs.edges = &edges;
  const rho::BaselineEstimate hist = rho::baseline_estimate(BaselineKind::HistogramMle, X, hs);
  CHECK(hist.params[0] == doctest::Approx(0.2));
  CHECK(hist.params[1] == doctest::Approx(0.8));
}
