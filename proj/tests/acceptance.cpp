#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "rho/affinity.hpp"
#include "rho/constants.hpp"
#include "rho/criterion.hpp"
#include "rho/models.hpp"
#include "rho/random.hpp"
#include "rho/selection.hpp"
#include "rho/simulate.hpp"

using namespace rho;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void report(int k, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  (%s)\n", k, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

}  // namespace

TEST_CASE("criterion 1: exact equivalences") {
  Timer timer;
  bool pass = true;
  std::string detail;

  // --- histograms: the estimator sits on the empirical frequencies ---
  {
    const std::vector<double> edges = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    std::map<int, ModelNet> nets;
    int failures = 0;
    for (int d = 0; d < 200; ++d) {
      RandomStream rng(424242, d);
      // random cell masses by stick breaking
      double u1 = rng.uniform01(), u2 = rng.uniform01();
      if (u1 > u2) std::swap(u1, u2);
      Eigen::VectorXd masses(3);
      masses << u1, u2 - u1, 1.0 - u2;
      const HistogramDensity truth(edges, masses);
      const int n = 10 + d % 21;  // 10..30
      std::vector<Obs> obs(n);
      for (int i = 0; i < n; ++i) obs[i] = truth.sample(rng);
      const Sample X(std::move(obs));

      auto it = nets.find(n);
      if (it == nets.end()) it = nets.emplace(n, make_histogram_net(edges, 60, n)).first;
      CriterionOptions copt;
      copt.threads = 2;
      const EstimateResult res = rho_estimate(X, it->second, copt);

      const Eigen::VectorXd freq = histogram_mle(X, edges);
      for (int c = 0; c < 3; ++c)
        if (std::fabs(it->second.params[res.index][c] - freq[c]) > 1.0 / 60 + 1e-12) ++failures;

      // and in Hellinger distance, against the projection of the frequencies
      const HistogramDensity mle(edges, freq);
      int proj = 0;
      double best = 2.0;
      for (int p = 0; p < it->second.size(); ++p) {
        const double h2 = hellinger_sq(it->second.points[p].coord(0), mle);
        if (h2 < best) {
          best = h2;
          proj = p;
        }
      }
      const double h2_step = 1.0 / 60;  // one-step moves shift at most 1/60 of mass
      const double h2_gap =
          hellinger_sq(res.point.coord(0), it->second.points[proj].coord(0));
      if (h2_gap > h2_step + 1e-12) ++failures;
    }
    pass = pass && failures == 0;
    detail += fmt("hist failures %g/200; ", failures);
  }

  // --- uniform shift: the criterion is exactly 0 on the covering interval ---
  {
    const auto q = std::make_shared<UniformDensity>(0.0, 0.5);
    const int n = 50;
    const ModelNet net = make_translation_net(q, -2.0, 2.0, 1e-3, n);
    int bad = 0;
    for (int d = 0; d < 12; ++d) {
      RandomStream rng(515151, d);
      std::vector<Obs> obs(n);
      for (int i = 0; i < n; ++i) obs[i] = q->translated(0.25)->sample(rng);
      const Sample X(std::move(obs));
      const Eigen::VectorXd xs = X.reals();
      const double lo = xs.maxCoeff() - 0.5, hi = xs.minCoeff() + 0.5;

      CriterionOptions copt;
      copt.threads = 2;
      const CriterionTable tbl = criterion_table(X, net, copt);
      for (int p = 0; p < net.size(); ++p) {
        const double theta = net.params[p][0];
        if (theta >= lo && theta <= hi) {
          if (tbl.upsilon[p] != 0.0) ++bad;
        } else {
          if (!(tbl.upsilon[p] >= kInvSqrt2)) ++bad;
        }
      }
    }
    pass = pass && bad == 0;
    detail += fmt("uniform grid violations %g; ", bad);
  }

  // --- sequence space: the longest-observation candidate attains zero ---
  {
    const std::vector<int> theta = {1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1};
    const DensityPtr truth = make_sequence_truth(theta, 2, 60);
    int bad = 0;
    for (int d = 0; d < 20; ++d) {
      RandomStream rng(616161, d);
      const int n = 50;
      std::vector<Obs> obs(n);
      for (int i = 0; i < n; ++i) obs[i] = truth->sample(rng);
      const Sample X(std::move(obs));
      const ModelNet net = make_sequence_net(X, 2, 60, n);
      std::size_t max_len = 0;
      for (int i = 0; i < n; ++i) max_len = std::max(max_len, X[i].seq.size());
      const CriterionTable tbl = criterion_table(X, net, {});
      bool found = false;
      for (int p = 0; p < net.size(); ++p)
        if (static_cast<std::size_t>(net.params[p].size()) == max_len) {
          found = true;
          if (tbl.upsilon[p] != 0.0) ++bad;
        }
      if (!found || tbl.upsilon[tbl.argmin] != 0.0) ++bad;
    }
    pass = pass && bad == 0;
    detail += fmt("sequence violations %g; ", bad);
  }

  const double secs = timer.secs();
  pass = pass && secs < 120.0;
  detail += fmt("runtime %.1f s < 120 s", secs);
  report(1, pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 2: least-squares variances in simple linear regression") {
  Scenario sc = bundled_scenario("linreg-gauss");
  sc.true_a = 0.7;
  sc.true_b = -0.4;
  sc.threads = 2;
  const RiskReport rep = run_scenario(sc);
  const RiskRow* ra = rep.find("least_squares", "sq_err_a", 101);
  const RiskRow* rb = rep.find("least_squares", "sq_err_b", 101);
  REQUIRE(ra != nullptr);
  REQUIRE(rb != nullptr);
  const double target_a = 1.0 / 101.0;                    // 0.009901
  const double target_b = 3.0 * 101.0 / (101.0 * 101.0 - 1.0);  // 0.029703
  const bool ok_a = std::fabs(ra->mean - target_a) <= 3.0 * ra->std_err;
  const bool ok_b = std::fabs(rb->mean - target_b) <= 3.0 * rb->std_err;
  const bool pass = ok_a && ok_b;
  report(2, pass,
         fmt("E(a-hat)^2 = %.6f vs 0.009901, E(b-hat)^2 = %.6f vs 0.029703, 3 SE", ra->mean,
             rb->mean));
  CHECK(pass);
}

TEST_CASE("criterion 3: closed forms against quadrature") {
  bool pass = true;
  double worst_pbeta = 0.0, worst_unif = 0.0;

  for (double beta : {0.5, 1.0, 2.0, 3.0})
    for (double lam : {1.1, 1.5, 2.0}) {
      const PBetaDensity a(beta), b(beta, 0.0, lam);
      const Interval w = a.truncation(1e-22);
      const double viaquad =
          1.0 - integrate_with_breakpoints(
                    [&](double x) { return std::sqrt(a.density(Obs(x)) * b.density(Obs(x))); },
                    w.lo, w.hi, integration_seeds({&a, &b}, w.lo, w.hi), {1e-10, 100000})
                    .value;
      worst_pbeta = std::max(worst_pbeta,
                             std::fabs(viaquad - pbeta_scale_hellinger_sq(beta, lam)));
    }
  pass = pass && worst_pbeta <= 1e-6;

  RandomStream rng(99, 0);
  for (int k = 0; k < 20; ++k) {
    const double t1 = rng.uniform(-1.0, 1.0);
    const double t2 = rng.uniform(-1.0, 1.0);
    const UniformDensity a(t1, 0.5), b(t2, 0.5);
    const double viaquad =
        integrate_with_breakpoints(
            [&](double x) { return std::sqrt(a.density(Obs(x)) * b.density(Obs(x))); },
            std::min(t1, t2) - 0.5, std::max(t1, t2) + 0.5,
            {t1 - 0.5, t1 + 0.5, t2 - 0.5, t2 + 0.5}, {1e-12, 10000})
            .value;
    const double closed = 1.0 - std::min(std::fabs(t1 - t2), 1.0);
    worst_unif = std::max(worst_unif, std::fabs(viaquad - closed));
  }
  pass = pass && worst_unif <= 1e-9;

  report(3, pass,
         fmt("pbeta worst gap %.2e <= 1e-6, uniform worst gap %.2e <= 1e-9", worst_pbeta,
             worst_unif));
  CHECK(pass);
}

TEST_CASE("criterion 4: inequality suite") {
  Timer timer;
  const InequalityReport rep = verify_inequalities(20240801, 10000, 2);
  bool pass = rep.all_pass();
  std::string detail;
  for (const auto& c : rep.checks)
    detail += c.name + (c.pass ? " ok " : " VIOLATED ") + fmt("(%.2e) ", c.worst_margin);
  const double secs = timer.secs();
  pass = pass && secs < 600.0;
  detail += fmt("runtime %.1f s < 600 s", secs);
  report(4, pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 5: rate separation") {
  bool pass = true;
  std::string detail;

  {
    Scenario sc = bundled_scenario("translation-uniform-rates");
    sc.threads = 2;
    const RiskReport rep = run_scenario(sc);
    const SlopeFit* rho_fit = rep.find_slope("rho", "abs_err");
    const SlopeFit* mean_fit = rep.find_slope("mean", "abs_err");
    REQUIRE(rho_fit != nullptr);
    REQUIRE(mean_fit != nullptr);
    pass = pass && rho_fit->slope <= -0.8;
    pass = pass && mean_fit->slope >= -0.65 && mean_fit->slope <= -0.35;
    detail += fmt("uniform slopes: rho %.3f <= -0.8, mean %.3f in [-0.65,-0.35]; ",
                  rho_fit->slope, mean_fit->slope);
  }

  {
    Scenario sc = bundled_scenario("translation-cauchy");
    sc.threads = 2;
    const RiskReport rep = run_scenario(sc);
    auto series = [&](const std::string& est) {
      std::vector<double> v;
      for (int n : sc.ns) v.push_back(rep.find(est, "sq_err", n)->mean);
      return v;
    };
    const auto rho_risk = series("rho");
    const auto med_risk = series("median");
    const auto mean_risk = series("mean");
    bool monotone = true;
    for (std::size_t i = 1; i < rho_risk.size(); ++i) {
      monotone = monotone && rho_risk[i] < rho_risk[i - 1];
      monotone = monotone && med_risk[i] < med_risk[i - 1];
    }
    const bool mean_stuck = mean_risk.back() >= mean_risk.front() / 1.5;
    pass = pass && monotone && mean_stuck;
    detail += fmt("cauchy: rho/median monotone %g, mean risk %.3g vs %.3g/1.5",
                  monotone ? 1.0 : 0.0, mean_risk.back(), mean_risk.front());
  }

  report(5, pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 6: robustness to gross outliers") {
  Scenario sc = bundled_scenario("robust-outliers");
  sc.threads = 2;
  const RiskReport rep = run_scenario(sc);
  const RiskRow* rho_row = rep.find("rho", "abs_err", 200);
  const RiskRow* mean_row = rep.find("mean", "abs_err", 200);
  REQUIRE(rho_row != nullptr);
  REQUIRE(mean_row != nullptr);
  const bool pass = rho_row->mean <= 0.5 * mean_row->mean;
  report(6, pass,
         fmt("mean |error|: rho %.4f <= half of empirical-mean %.4f", rho_row->mean,
             mean_row->mean));
  CHECK(pass);
}

TEST_CASE("criterion 7: selection sanity") {
  bool pass = true;
  std::string detail;

  // single model with a constant penalty reproduces the plain estimator
  {
    const std::vector<double> edges = {0.0, 0.5, 1.0};
    const int n = 30;
    ModelNet net = make_histogram_net(edges, 20, n);
    PenalizedFamily fam;
    fam.models = {net};
    fam.delta = {0.0};
    finalize_family(fam);
    Eigen::VectorXd masses(2);
    masses << 0.35, 0.65;
    const HistogramDensity truth(edges, masses);
    int mismatches = 0;
    for (int d = 0; d < 20; ++d) {
      RandomStream rng(717171, d);
      std::vector<Obs> obs(n);
      for (int i = 0; i < n; ++i) obs[i] = truth.sample(rng);
      const Sample X(std::move(obs));
      const SelectResult sel = rho_select(X, fam, {});
      const EstimateResult est = rho_estimate(X, net, {});
      if (sel.union_index != est.index ||
          sel.point.signature() != est.point.signature())
        ++mismatches;
    }
    pass = pass && mismatches == 0;
    detail += fmt("single-model mismatches %g/20; ", mismatches);
  }

  // nested histogram family: data from the coarse model selects it
  {
    const int n = 50;
    ModelNet coarse = make_histogram_net({0.0, 0.5, 1.0}, 10, n);
    ModelNet fine = make_histogram_net({0.0, 0.25, 0.5, 0.75, 1.0}, 10, n);
    PenalizedFamily fam;
    fam.models = {coarse, fine};
    fam.delta = {std::log(2.0), std::log(2.0)};
    finalize_family(fam);

    Eigen::VectorXd masses(2);
    masses << 0.3, 0.7;
    const HistogramDensity truth({0.0, 0.5, 1.0}, masses);
    int coarse_wins = 0;
    for (int rep = 0; rep < 200; ++rep) {
      RandomStream rng(818181, rep);
      std::vector<Obs> obs(n);
      for (int i = 0; i < n; ++i) obs[i] = truth.sample(rng);
      const Sample X(std::move(obs));
      CriterionOptions copt;
      copt.threads = 2;
      if (rho_select(X, fam, copt).model_index == 0) ++coarse_wins;
    }
    pass = pass && coarse_wins >= 180;
    detail += fmt("coarse selected %g/200 >= 180", coarse_wins);
  }

  report(7, pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 8: the estimator recovers the grid MLE") {
  Scenario sc = bundled_scenario("mle-recovery");
  sc.threads = 2;
  const RiskReport rep = run_scenario(sc);
  const RiskRow* agree = rep.find("rho", "mle_agreement", 200);
  REQUIRE(agree != nullptr);
  const bool pass = agree->mean >= 0.95;
  report(8, pass, fmt("agreement rate %.3f >= 0.95 over %g replications", agree->mean,
                      agree->replications));
  CHECK(pass);
}
