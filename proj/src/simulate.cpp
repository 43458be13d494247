#include "rho/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>

#include "rho/affinity.hpp"
#include "rho/constants.hpp"
#include "rho/models.hpp"
#include "rho/selection.hpp"

namespace rho {

// ---------------------------------------------------------------------------
// baselines
// ---------------------------------------------------------------------------

double empirical_mean(const Sample& X) { return X.reals().mean(); }

double empirical_median(const Sample& X) {
  Eigen::VectorXd v = X.reals();
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  const int n = static_cast<int>(s.size());
  const int rank = (n % 2 == 0) ? n / 2 : (n + 1) / 2;  // 1-indexed
  return s[rank - 1];
}

double midrange(const Sample& X) {
  const Eigen::VectorXd v = X.reals();
  return 0.5 * (v.minCoeff() + v.maxCoeff());
}

MleGridResult mle_grid(const Sample& X, const ModelNet& net) {
  net.check();
  if (X.size() != net.dimension())
    throw std::invalid_argument("mle_grid: sample length does not match the net");
  MleGridResult res;
  double best = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < net.size(); ++p) {
    double ll = 0.0;
    for (int i = 0; i < X.size(); ++i) {
      const double d = net.points[p].coord(i).density(X[i]);
      if (std::isinf(d)) {
        res.defined = false;  // unbounded likelihood
        return res;
      }
      ll += d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
    }
    if (ll > best) {
      best = ll;
      res.index = p;
    }
  }
  if (res.index < 0) res.index = 0;  // all-zero likelihood: keep lowest index
  res.log_likelihood = best;
  return res;
}

Eigen::Vector2d least_squares_affine(const Sample& X, const Eigen::VectorXd& design) {
  const Eigen::VectorXd y = X.reals();
  if (y.size() != design.size())
    throw std::invalid_argument("least_squares_affine: design length mismatch");
  const double xbar = design.mean();
  const double ybar = y.mean();
  const Eigen::VectorXd xc = design.array() - xbar;
  const double sxx = xc.squaredNorm();
  if (sxx <= 0.0) throw std::invalid_argument("least_squares_affine: degenerate design");
  const double b = xc.dot(y) / sxx;
  return {ybar - b * xbar, b};
}

Eigen::VectorXd histogram_mle(const Sample& X, const std::vector<double>& edges) {
  const HistogramDensity ref(edges, Eigen::VectorXd::Ones(edges.size() - 1) /
                                        static_cast<double>(edges.size() - 1));
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(ref.cells());
  for (int i = 0; i < X.size(); ++i) {
    const int c = ref.cell_of(X[i].x);
    if (c < 0) throw std::invalid_argument("histogram_mle: observation outside the partition");
    counts[c] += 1.0;
  }
  return counts / static_cast<double>(X.size());
}

BaselineEstimate baseline_estimate(BaselineKind kind, const Sample& X, const BaselineInputs& inputs) {
  BaselineEstimate out;
  switch (kind) {
    case BaselineKind::Mean:
      out.scalar = empirical_mean(X);
      return out;
    case BaselineKind::Median:
      out.scalar = empirical_median(X);
      return out;
    case BaselineKind::Midrange:
      out.scalar = midrange(X);
      return out;
    case BaselineKind::MleGrid: {
      if (!inputs.net) throw std::invalid_argument("baseline_estimate: grid MLE needs a net");
      const MleGridResult res = mle_grid(X, *inputs.net);
      out.defined = res.defined;
      out.index = res.index;
      if (res.defined && !inputs.net->params.empty()) {
        out.params = inputs.net->params[res.index];
        if (out.params.size() == 1) out.scalar = out.params[0];
      }
      return out;
    }
    case BaselineKind::LeastSquares: {
      if (!inputs.design)
        throw std::invalid_argument("baseline_estimate: least squares needs a design");
      out.params = least_squares_affine(X, *inputs.design);
      return out;
    }
    case BaselineKind::HistogramMle: {
      if (!inputs.edges)
        throw std::invalid_argument("baseline_estimate: histogram frequencies need a partition");
      out.params = histogram_mle(X, *inputs.edges);
      return out;
    }
  }
  throw std::invalid_argument("baseline_estimate: unknown kind");
}

// ---------------------------------------------------------------------------
// scenario machinery
// ---------------------------------------------------------------------------

namespace {

DensityPtr make_error_density(const std::string& error, double sigma, double pbeta_shape) {
  if (error == "gauss") return std::make_shared<GaussianDensity>(0.0, sigma);
  if (error == "uniform") return std::make_shared<UniformDensity>(0.0, sigma);
  if (error == "cauchy") return std::make_shared<CauchyDensity>(0.0, sigma);
  if (error == "laplace") return std::make_shared<LaplaceDensity>(0.0, sigma);
  if (error == "pbeta") return std::make_shared<PBetaDensity>(pbeta_shape, 0.0, sigma);
  if (error == "invsqrt") return std::make_shared<InvSqrtDensity>(0.0);
  throw std::invalid_argument("unknown error density: " + error);
}

int resolve_threads(int requested) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::max(t, 1);
}

template <typename Fn>
void parallel_reps(int reps, int threads, Fn&& fn) {
  threads = std::min(threads, reps);
  if (threads <= 1) {
    for (int r = 0; r < reps; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (int tid = 1; tid < threads; ++tid)
    pool.emplace_back([&, tid] {
      for (int r = tid; r < reps; r += threads) fn(r);
    });
  for (int r = 0; r < reps; r += threads) fn(r);
  for (auto& th : pool) th.join();
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

// per-(estimator, loss, n) replication values, in a deterministic order
struct LossStore {
  std::map<std::string, std::vector<std::vector<double>>> values;  // key -> [n][rep]
  std::vector<std::string> key_order;
  int n_count = 0, reps = 0;

  void init(const std::vector<std::string>& keys, int n_count_, int reps_) {
    n_count = n_count_;
    reps = reps_;
    key_order = keys;
    for (const auto& k : keys)
      values[k].assign(n_count, std::vector<double>(reps, std::numeric_limits<double>::quiet_NaN()));
  }
  void record(const std::string& key, int n_idx, int rep, double v) {
    auto it = values.find(key);
    if (it == values.end()) throw std::logic_error("unregistered loss key " + key);
    it->second[n_idx][rep] = v;
  }
};

void aggregate(const Scenario& sc, const LossStore& store, RiskReport& report) {
  for (const auto& key : store.key_order) {
    const auto& per_n = store.values.at(key);
    const auto sep = key.find('/');
    const std::string estimator = key.substr(0, sep);
    const std::string loss = key.substr(sep + 1);
    std::vector<double> log_n, log_mean;
    for (std::size_t ni = 0; ni < per_n.size(); ++ni) {
      std::vector<double> vals;
      vals.reserve(per_n[ni].size());
      for (double v : per_n[ni])
        if (!std::isnan(v)) vals.push_back(v);
      if (vals.empty()) continue;
      RiskRow row;
      row.scenario = sc.name;
      row.estimator = estimator;
      row.loss = loss;
      row.n = sc.ns[ni];
      row.replications = static_cast<int>(vals.size());
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= vals.size();
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      var = vals.size() > 1 ? var / (vals.size() - 1.0) : 0.0;
      row.mean = mean;
      row.std_err = std::sqrt(var / vals.size());
      std::sort(vals.begin(), vals.end());
      row.q05 = quantile_sorted(vals, 0.05);
      row.q50 = quantile_sorted(vals, 0.50);
      row.q95 = quantile_sorted(vals, 0.95);
      report.rows.push_back(row);
      if (mean > 0.0) {
        log_n.push_back(std::log(static_cast<double>(sc.ns[ni])));
        log_mean.push_back(std::log(mean));
      }
    }
    if (log_n.size() >= 3) {
      const int k = static_cast<int>(log_n.size());
      double xb = 0, yb = 0;
      for (int i = 0; i < k; ++i) {
        xb += log_n[i];
        yb += log_mean[i];
      }
      xb /= k;
      yb /= k;
      double sxx = 0, sxy = 0;
      for (int i = 0; i < k; ++i) {
        sxx += (log_n[i] - xb) * (log_n[i] - xb);
        sxy += (log_n[i] - xb) * (log_mean[i] - yb);
      }
      const double slope = sxy / sxx;
      double ssr = 0;
      for (int i = 0; i < k; ++i) {
        const double fit = yb + slope * (log_n[i] - xb);
        ssr += (log_mean[i] - fit) * (log_mean[i] - fit);
      }
      SlopeFit fit;
      fit.estimator = estimator;
      fit.loss = loss;
      fit.slope = slope;
      fit.slope_se = k > 2 ? std::sqrt(ssr / (k - 2) / sxx) : 0.0;
      report.slopes.push_back(fit);
    }
  }
}

bool wants(const Scenario& sc, const std::string& estimator) {
  return std::find(sc.estimators.begin(), sc.estimators.end(), estimator) != sc.estimators.end();
}

std::uint64_t rep_stream(std::uint64_t seed, int n_idx, int rep) {
  return (static_cast<std::uint64_t>(n_idx) << 32) ^ static_cast<std::uint64_t>(rep) ^ seed << 1;
}

// ---- translation ----------------------------------------------------------

void run_translation(const Scenario& sc, RiskReport& report) {
  const DensityPtr err = make_error_density(sc.error, sc.sigma, sc.pbeta);
  const DensityPtr truth_coord = err->translated(sc.true_theta);
  const bool hook = truth_coord->affinity_to(*truth_coord->translated(0.1)).has_value();

  std::vector<std::string> keys;
  for (const std::string& e : sc.estimators) {
    keys.push_back(e + "/abs_err");
    keys.push_back(e + "/sq_err");
    if (hook) keys.push_back(e + "/hellinger_sq");
  }
  if (wants(sc, "rho") && wants(sc, "mle_grid")) keys.push_back("rho/mle_agreement");

  LossStore store;
  store.init(keys, static_cast<int>(sc.ns.size()), sc.replications);
  const int threads = resolve_threads(sc.threads);

  for (std::size_t ni = 0; ni < sc.ns.size(); ++ni) {
    const int n = sc.ns[ni];
    ModelNet net;
    const bool needs_net = wants(sc, "rho") || wants(sc, "mle_grid");
    if (needs_net) net = make_translation_net(err, sc.grid_min, sc.grid_max, sc.grid_step, n);

    parallel_reps(sc.replications, threads, [&](int rep) {
      RandomStream rng(sc.seed, rep_stream(sc.seed, static_cast<int>(ni), rep));
      std::vector<Obs> obs(n);
      for (int i = 0; i < n; ++i) {
        if (sc.contamination > 0.0 && rng.uniform01() < sc.contamination)
          obs[i] = Obs(sc.outlier_value);
        else
          obs[i] = truth_coord->sample(rng);
      }
      const Sample X(std::move(obs));

      auto record_theta = [&](const std::string& est, double theta_hat) {
        store.record(est + "/abs_err", ni, rep, std::fabs(theta_hat - sc.true_theta));
        store.record(est + "/sq_err", ni, rep,
                     (theta_hat - sc.true_theta) * (theta_hat - sc.true_theta));
        if (hook) {
          const DensityPtr est_coord = err->translated(theta_hat);
          store.record(est + "/hellinger_sq", ni, rep, hellinger_sq(*truth_coord, *est_coord));
        }
      };

      int rho_idx = -1, mle_idx = -1;
      if (wants(sc, "rho")) {
        CriterionOptions copt;
        copt.threads = 1;
        const EstimateResult res = rho_estimate(X, net, copt);
        rho_idx = res.index;
        record_theta("rho", net.params[res.index][0]);
      }
      if (wants(sc, "mle_grid")) {
        const MleGridResult res = mle_grid(X, net);
        if (res.defined) {
          mle_idx = res.index;
          record_theta("mle_grid", net.params[res.index][0]);
        }
      }
      if (rho_idx >= 0 && mle_idx >= 0)
        store.record("rho/mle_agreement", ni, rep, rho_idx == mle_idx ? 1.0 : 0.0);
      if (wants(sc, "mean")) record_theta("mean", empirical_mean(X));
      if (wants(sc, "median")) record_theta("median", empirical_median(X));
      if (wants(sc, "midrange")) record_theta("midrange", midrange(X));
    });
  }
  aggregate(sc, store, report);
}

// ---- simple linear regression ---------------------------------------------

void run_linreg(const Scenario& sc, RiskReport& report) {
  const DensityPtr err = make_error_density(sc.error, sc.sigma, sc.pbeta);
  const auto order = declared_order(*err);

  std::vector<std::string> keys;
  for (const std::string& e : sc.estimators) {
    keys.push_back(e + "/sq_err_a");
    keys.push_back(e + "/sq_err_b");
    keys.push_back(e + "/param_sq");
    if (order) keys.push_back(e + "/d_loss");
  }
  LossStore store;
  store.init(keys, static_cast<int>(sc.ns.size()), sc.replications);
  const int threads = resolve_threads(sc.threads);

  for (std::size_t ni = 0; ni < sc.ns.size(); ++ni) {
    const int n = sc.ns[ni];
    const Eigen::VectorXd x = affine_design(n);
    Eigen::MatrixXd basis(n, 2);
    basis.col(0).setOnes();
    basis.col(1) = x;
    const Eigen::VectorXd g_true = basis * Eigen::Vector2d(sc.true_a, sc.true_b);

    ModelNet net;
    if (wants(sc, "rho")) {
      auto grid = [&](double center, double half) {
        const int count = static_cast<int>(std::floor(2.0 * half / sc.ab_step + 1e-9)) + 1;
        Eigen::VectorXd g(count);
        for (int k = 0; k < count; ++k) g[k] = center - half + k * sc.ab_step;
        return g;
      };
      net = make_fixed_design_net(
          err, basis, {grid(sc.true_a, sc.a_half_range), grid(sc.true_b, sc.b_half_range)});
    }

    parallel_reps(sc.replications, threads, [&](int rep) {
      RandomStream rng(sc.seed, rep_stream(sc.seed, static_cast<int>(ni), rep));
      std::vector<Obs> obs(n);
      for (int i = 0; i < n; ++i) obs[i] = Obs(g_true[i] + err->sample(rng).x);
      const Sample X(std::move(obs));

      auto record_ab = [&](const std::string& est, double a_hat, double b_hat) {
        const double da = a_hat - sc.true_a, db = b_hat - sc.true_b;
        store.record(est + "/sq_err_a", ni, rep, da * da);
        store.record(est + "/sq_err_b", ni, rep, db * db);
        store.record(est + "/param_sq", ni, rep, da * da + db * db);
        if (order) {
          const Eigen::VectorXd g_hat = basis * Eigen::Vector2d(a_hat, b_hat);
          store.record(est + "/d_loss", ni, rep, d_loss(g_hat, g_true, order->alpha, order->A_q));
        }
      };

      if (wants(sc, "rho")) {
        CriterionOptions copt;
        copt.threads = 1;
        const EstimateResult res = rho_estimate(X, net, copt);
        record_ab("rho", net.params[res.index][0], net.params[res.index][1]);
      }
      if (wants(sc, "least_squares")) {
        const Eigen::Vector2d ab = least_squares_affine(X, x);
        record_ab("least_squares", ab[0], ab[1]);
      }
    });
  }
  aggregate(sc, store, report);
}

// ---- sequence space ---------------------------------------------------------

void run_sequence(const Scenario& sc, RiskReport& report) {
  std::vector<int> theta = sc.alphabet_theta;
  if (theta.empty()) theta = {1, 0, 1, 1, 0, 1, 0, 0, 1, 1};
  const DensityPtr truth = make_sequence_truth(theta, sc.alphabet, sc.depth_cap);

  std::vector<std::string> keys = {"rho/hellinger_sq", "rho/upsilon_min"};
  LossStore store;
  store.init(keys, static_cast<int>(sc.ns.size()), sc.replications);
  const int threads = resolve_threads(sc.threads);

  for (std::size_t ni = 0; ni < sc.ns.size(); ++ni) {
    const int n = sc.ns[ni];
    parallel_reps(sc.replications, threads, [&](int rep) {
      RandomStream rng(sc.seed, rep_stream(sc.seed, static_cast<int>(ni), rep));
      std::vector<Obs> obs(n);
      for (int i = 0; i < n; ++i) obs[i] = truth->sample(rng);
      const Sample X(std::move(obs));
      const ModelNet net = make_sequence_net(X, sc.alphabet, sc.depth_cap, n);
      CriterionOptions copt;
      copt.threads = 1;
      const EstimateResult res = rho_estimate(X, net, copt);
      store.record("rho/hellinger_sq", ni, rep,
                   hellinger_sq(*truth, res.point.coord(0)));
      store.record("rho/upsilon_min", ni, rep, res.table.upsilon[res.index]);
    });
  }
  aggregate(sc, store, report);
}

// ---- histogram --------------------------------------------------------------

void run_histogram(const Scenario& sc, RiskReport& report) {
  std::vector<double> edges = sc.edges;
  if (edges.empty()) edges = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  Eigen::VectorXd masses = sc.true_masses;
  if (masses.size() == 0) {
    masses.resize(static_cast<int>(edges.size()) - 1);
    masses.setConstant(1.0 / masses.size());
  }
  const DensityPtr truth = std::make_shared<HistogramDensity>(edges, masses);

  std::vector<std::string> keys;
  if (wants(sc, "rho")) keys.push_back("rho/hellinger_sq");
  if (wants(sc, "histogram_mle")) keys.push_back("histogram_mle/hellinger_sq");
  LossStore store;
  store.init(keys, static_cast<int>(sc.ns.size()), sc.replications);
  const int threads = resolve_threads(sc.threads);

  for (std::size_t ni = 0; ni < sc.ns.size(); ++ni) {
    const int n = sc.ns[ni];
    ModelNet net;
    if (wants(sc, "rho")) net = make_histogram_net(edges, sc.resolution, n);
    parallel_reps(sc.replications, threads, [&](int rep) {
      RandomStream rng(sc.seed, rep_stream(sc.seed, static_cast<int>(ni), rep));
      std::vector<Obs> obs(n);
      for (int i = 0; i < n; ++i) obs[i] = truth->sample(rng);
      const Sample X(std::move(obs));
      if (wants(sc, "rho")) {
        CriterionOptions copt;
        copt.threads = 1;
        const EstimateResult res = rho_estimate(X, net, copt);
        store.record("rho/hellinger_sq", ni, rep, hellinger_sq(*truth, res.point.coord(0)));
      }
      if (wants(sc, "histogram_mle")) {
        const HistogramDensity mle(edges, histogram_mle(X, edges));
        store.record("histogram_mle/hellinger_sq", ni, rep, hellinger_sq(*truth, mle));
      }
    });
  }
  aggregate(sc, store, report);
}

}  // namespace

RiskReport run_scenario(const Scenario& sc) {
  if (sc.ns.empty()) throw std::invalid_argument("run_scenario: no sample sizes");
  if (sc.replications < 1) throw std::invalid_argument("run_scenario: no replications");
  RiskReport report;
  if (sc.family == "translation")
    run_translation(sc, report);
  else if (sc.family == "linreg")
    run_linreg(sc, report);
  else if (sc.family == "sequence")
    run_sequence(sc, report);
  else if (sc.family == "histogram")
    run_histogram(sc, report);
  else
    throw std::invalid_argument("run_scenario: unknown family " + sc.family);
  return report;
}

std::string RiskReport::to_csv() const {
  std::string out = "scenario,estimator,n,replications,loss_name,mean,std_err,q05,q50,q95\n";
  char buf[320];
  for (const RiskRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.scenario.c_str(), r.estimator.c_str(), r.n, r.replications, r.loss.c_str(),
                  r.mean, r.std_err, r.q05, r.q50, r.q95);
    out += buf;
  }
  return out;
}

const RiskRow* RiskReport::find(const std::string& estimator, const std::string& loss,
                                int n) const {
  for (const RiskRow& r : rows)
    if (r.estimator == estimator && r.loss == loss && r.n == n) return &r;
  return nullptr;
}

const SlopeFit* RiskReport::find_slope(const std::string& estimator,
                                       const std::string& loss) const {
  for (const SlopeFit& s : slopes)
    if (s.estimator == estimator && s.loss == loss) return &s;
  return nullptr;
}

Scenario bundled_scenario(const std::string& name) {
  Scenario sc;
  sc.name = name;
  if (name == "translation-compare") {
    sc.family = "translation";
    sc.error = "gauss";
    sc.true_theta = 0.0;
    sc.grid_min = -0.5;
    sc.grid_max = 0.5;
    sc.grid_step = 2e-3;
    sc.ns = {50, 100, 200};
    sc.replications = 200;
    sc.estimators = {"rho", "mean", "median", "mle_grid"};
  } else if (name == "translation-uniform-rates") {
    sc.family = "translation";
    sc.error = "uniform";
    sc.sigma = 0.5;  // halfwidth
    sc.true_theta = 0.0;
    sc.grid_min = -0.55;
    sc.grid_max = 0.55;
    sc.grid_step = 1e-3;
    sc.ns = {50, 100, 200, 400};
    sc.replications = 300;
    sc.estimators = {"rho", "mean", "midrange"};
  } else if (name == "translation-cauchy") {
    sc.family = "translation";
    sc.error = "cauchy";
    sc.true_theta = 0.0;
    sc.grid_min = -3.0;
    sc.grid_max = 3.0;
    sc.grid_step = 0.01;
    sc.ns = {50, 100, 200, 400};
    sc.replications = 300;
    sc.estimators = {"rho", "mean", "median"};
  } else if (name == "robust-outliers") {
    sc.family = "translation";
    sc.error = "gauss";
    sc.true_theta = 0.0;
    sc.contamination = 0.05;
    sc.outlier_value = 50.0;
    sc.grid_min = -0.4;
    sc.grid_max = 0.4;
    sc.grid_step = 1e-3;
    sc.ns = {200};
    sc.replications = 300;
    sc.estimators = {"rho", "mean", "median"};
  } else if (name == "mle-recovery") {
    sc.family = "translation";
    sc.error = "gauss";
    sc.true_theta = 0.0;
    sc.grid_min = -0.5;
    sc.grid_max = 0.5;
    sc.grid_step = 1e-3;
    sc.ns = {25, 50, 100, 200};  // smaller n reported without a threshold
    sc.replications = 200;
    sc.estimators = {"rho", "mle_grid"};
  } else if (name == "linreg-uniform-errors") {
    sc.family = "linreg";
    sc.error = "uniform";
    sc.sigma = 0.5;
    sc.true_a = 0.0;
    sc.true_b = 0.0;
    sc.a_half_range = 0.2;
    sc.b_half_range = 0.3;
    sc.ab_step = 0.02;
    sc.ns = {25, 51, 101};
    sc.replications = 200;
    sc.estimators = {"rho", "least_squares"};
  } else if (name == "linreg-gauss") {
    sc.family = "linreg";
    sc.error = "gauss";
    sc.ns = {101};
    sc.replications = 10000;
    sc.estimators = {"least_squares"};
  } else if (name == "sequence-model") {
    sc.family = "sequence";
    sc.ns = {25, 50, 100};
    sc.replications = 200;
    sc.estimators = {"rho"};
  } else if (name == "histogram-frequencies") {
    sc.family = "histogram";
    Eigen::VectorXd m(3);
    m << 0.5, 0.3, 0.2;
    sc.true_masses = m;
    sc.resolution = 60;
    sc.ns = {30};
    sc.replications = 100;
    sc.estimators = {"rho", "histogram_mle"};
  } else {
    throw std::invalid_argument("unknown bundled scenario: " + name);
  }
  return sc;
}

std::vector<std::string> bundled_scenario_names() {
  return {"translation-compare", "translation-uniform-rates", "translation-cauchy",
          "robust-outliers",     "mle-recovery",              "linreg-uniform-errors",
          "linreg-gauss",        "sequence-model",            "histogram-frequencies"};
}

// ---------------------------------------------------------------------------
// inequality verification
// ---------------------------------------------------------------------------

namespace {

// E_s[psi(sqrt(t/s_bar))], exact for sequence triples, quadrature otherwise
double expected_psi(const CoordinateDensity& s, const CoordinateDensity& s_bar,
                    const CoordinateDensity& t, double tol) {
  const auto* ss = dynamic_cast<const SequenceDensity*>(&s);
  const auto* sb = dynamic_cast<const SequenceDensity*>(&s_bar);
  const auto* st = dynamic_cast<const SequenceDensity*>(&t);
  if (ss && sb && st) {
    auto pow2 = [](int j) { return j > 1000 ? 0.0 : std::ldexp(1.0, -j); };
    return pow2(ss->common_prefix(*sb)) - pow2(ss->common_prefix(*st));
  }
  const Interval w = s.truncation(std::pow(tol / 4.0, 2));
  auto f = [&](double x) {
    const Obs o(x);
    const double sv = s.density(o);
    if (sv == 0.0) return 0.0;
    return psi_of_sqrt_pair(std::sqrt(s_bar.density(o)), std::sqrt(t.density(o))) * sv;
  };
  return integrate_with_breakpoints(f, w.lo, w.hi, integration_seeds({&s, &s_bar, &t}, w.lo, w.hi),
                                    {tol, 100000, true})
      .value;
}

double expected_psi_sq(const CoordinateDensity& s, const CoordinateDensity& s_bar,
                       const CoordinateDensity& t, double tol) {
  const Interval w = s.truncation(std::pow(tol / 4.0, 2));
  auto f = [&](double x) {
    const Obs o(x);
    const double sv = s.density(o);
    if (sv == 0.0) return 0.0;
    const double p = psi_of_sqrt_pair(std::sqrt(s_bar.density(o)), std::sqrt(t.density(o)));
    return p * p * sv;
  };
  return integrate_with_breakpoints(f, w.lo, w.hi, integration_seeds({&s, &s_bar, &t}, w.lo, w.hi),
                                    {tol, 100000, true})
      .value;
}

struct CheckBuilder {
  InequalityCheck check;
  explicit CheckBuilder(std::string name) { check.name = std::move(name); }
  void margin(double m, const std::string& where) {
    if (check.detail.empty() || m < check.worst_margin) {
      check.worst_margin = check.detail.empty() ? m : std::min(m, check.worst_margin);
      check.detail = where;
    }
  }
  InequalityCheck done(double tolerance) {
    check.pass = check.worst_margin >= -tolerance;
    return check;
  }
};

std::vector<DensityPtr> continuous_zoo() {
  Eigen::VectorXd m1(3), m2(3);
  m1 << 0.5, 0.3, 0.2;
  m2 << 0.2, 0.5, 0.3;
  return {
      std::make_shared<GaussianDensity>(0.0, 1.0),
      std::make_shared<GaussianDensity>(0.5, 1.0),
      std::make_shared<GaussianDensity>(1.0, 1.3),
      std::make_shared<LaplaceDensity>(0.0, 1.0),
      std::make_shared<LaplaceDensity>(0.7, 1.0),
      std::make_shared<UniformDensity>(0.1, 0.8),
      std::make_shared<UniformDensity>(0.4, 0.8),
      std::make_shared<PBetaDensity>(0.5),
      std::make_shared<PBetaDensity>(2.0),
      std::make_shared<CauchyDensity>(0.0, 1.0),
      std::make_shared<HistogramDensity>(std::vector<double>{-1.0, -0.2, 0.4, 1.0}, m1),
      std::make_shared<HistogramDensity>(std::vector<double>{-1.0, -0.2, 0.4, 1.0}, m2),
  };
}

}  // namespace

InequalityReport verify_inequalities(std::uint64_t seed, int budget, int threads) {
  InequalityReport report;
  const Constants& K = Constants::get();
  const AffinityOptions aopt{1e-9, 100000};
  const double quad_tol = 1e-6;
  const std::vector<DensityPtr> zoo = continuous_zoo();
  RandomStream rng(seed, 0);

  // deterministic triple draws from the zoo
  std::vector<std::array<int, 3>> triples;
  for (int k = 0; k < 12; ++k) {
    const int a = rng.uniform_int(static_cast<int>(zoo.size()));
    const int b = rng.uniform_int(static_cast<int>(zoo.size()));
    const int c = rng.uniform_int(static_cast<int>(zoo.size()));
    triples.push_back({a, b, c});
  }

  {  // 0 <= varrho(s,t,t') - rho(s,t) <= [h2(s,t) + h2(s,t')]/sqrt(2)
    CheckBuilder cb("rhoM-approx");
    for (const auto& [a, b, c] : triples) {
      const ProductDensity s = ProductDensity::iid(zoo[a], 1);
      const ProductDensity t = ProductDensity::iid(zoo[b], 1);
      const ProductDensity u = ProductDensity::iid(zoo[c], 1);
      const double varrho = varrho_population(s, t, u, aopt);
      const double rho_st = hellinger_affinity(*zoo[a], *zoo[b], aopt);
      const double gap = varrho - rho_st;
      const double bound = (hellinger_sq(*zoo[a], *zoo[b], aopt) +
                            hellinger_sq(*zoo[a], *zoo[c], aopt)) / std::sqrt(2.0);
      const std::string where = "triple(" + std::to_string(a) + "," + std::to_string(b) + "," +
                                std::to_string(c) + ")";
      cb.margin(gap, where + " lower");
      cb.margin(bound - gap, where + " upper");
    }
    report.checks.push_back(cb.done(quad_tol));
  }

  {  // expectation bounds for T at n = 20, within 3 Monte-Carlo SEs
    CheckBuilder ub("eq-UbT");
    CheckBuilder lb("eq-LbT");
    CheckBuilder unb("varrho-unbiased");
    const int n = 20;
    const int reps = std::max(budget, 1000);
    const std::vector<std::array<int, 3>> mc_triples = {{0, 1, 2}, {3, 0, 4}, {5, 6, 0}};
    for (const auto& [a, b, c] : mc_triples) {
      const CoordinateDensity& s = *zoo[a];
      const CoordinateDensity& t = *zoo[b];
      const CoordinateDensity& u = *zoo[c];
      const ProductDensity tp = ProductDensity::iid(zoo[b], n);
      const ProductDensity up = ProductDensity::iid(zoo[c], n);
      const double dterm = t_statistic_deterministic(tp, up, aopt);
      const double rho_tr = mixture_affinity(t, u, aopt);
      const double h2_st = n * hellinger_sq(s, t, aopt);
      const double h2_su = n * hellinger_sq(s, u, aopt);
      const double varrho_pop =
          varrho_population(ProductDensity::iid(zoo[a], n), tp, up, aopt);

      std::vector<double> t_vals(reps), vr_vals(reps);
      parallel_reps(reps, resolve_threads(threads), [&](int r) {
        RandomStream rs(seed, 1000 + r);
        double psi_part = 0.0, ratio_part = 0.0;
        for (int i = 0; i < n; ++i) {
          const Obs x = s.sample(rs);
          const double av = t.density(x), bv = u.density(x);
          psi_part += psi_of_sqrt_pair(std::sqrt(av), std::sqrt(bv));
          const double rv = 0.5 * (av + bv);
          ratio_part += rv == 0.0 ? 0.0 : std::sqrt(av / rv);
        }
        t_vals[r] = dterm + psi_part / std::sqrt(2.0);
        vr_vals[r] = 0.5 * (n * rho_tr + ratio_part);
      });
      double mean_t = 0, mean_vr = 0;
      for (int r = 0; r < reps; ++r) {
        mean_t += t_vals[r];
        mean_vr += vr_vals[r];
      }
      mean_t /= reps;
      mean_vr /= reps;
      double var_t = 0, var_vr = 0;
      for (int r = 0; r < reps; ++r) {
        var_t += (t_vals[r] - mean_t) * (t_vals[r] - mean_t);
        var_vr += (vr_vals[r] - mean_vr) * (vr_vals[r] - mean_vr);
      }
      const double se_t = std::sqrt(var_t / (reps - 1.0) / reps);
      const double se_vr = std::sqrt(var_vr / (reps - 1.0) / reps);

      const std::string where = "triple(" + std::to_string(a) + "," + std::to_string(b) + "," +
                                std::to_string(c) + ")";
      ub.margin(K.c2 * h2_st - 8.0 * K.c0 * h2_su + 3.0 * se_t - mean_t, where);
      lb.margin(mean_t - (8.0 * K.c0 * h2_st - K.c2 * h2_su) + 3.0 * se_t, where);
      unb.margin(3.0 * se_vr - std::fabs(mean_vr - varrho_pop), where);
    }
    report.checks.push_back(ub.done(0.0));
    report.checks.push_back(lb.done(0.0));
    report.checks.push_back(unb.done(0.0));
  }

  {  // E[psi^2(sqrt(t/sbar))] <= 6 [h2(s,t) + h2(s,sbar)] per coordinate
    CheckBuilder cb("variance-bound");
    for (const auto& [a, b, c] : triples) {
      if (zoo[c]->is_discrete()) continue;
      const double lhs = expected_psi_sq(*zoo[a], *zoo[c], *zoo[b], 1e-8);
      const double rhs =
          6.0 * (hellinger_sq(*zoo[a], *zoo[b], aopt) + hellinger_sq(*zoo[a], *zoo[c], aopt));
      cb.margin(rhs - lhs, "triple(" + std::to_string(a) + "," + std::to_string(b) + "," +
                               std::to_string(c) + ")");
    }
    report.checks.push_back(cb.done(quad_tol));
  }

  {  // shape-discretization bounds for the beta-exponential family
    CheckBuilder cb("approx-q");
    const std::vector<std::pair<double, double>> pairs = {
        {0.3, 0.5}, {0.2, 0.9}, {0.7, 1.0}, {1.2, 2.5}, {1.1, 2.9}, {3.5, 5.0}, {4.0, 8.0}};
    for (const auto& [lo, hi] : pairs) {
      const PBetaDensity pl(lo), ph(hi);
      const double h2 = hellinger_sq(pl, ph, aopt);
      double bound;
      if (hi <= 1.0)
        bound = 13.0 / 6.0 * std::pow(hi / lo - 1.0, 2);
      else if (hi <= 3.0)
        bound = 7.0 / 4.0 * std::pow(hi - lo, 2);
      else
        bound = std::pow(1.3 * (hi - lo) * std::log(hi), 2);
      cb.margin(std::min(bound, 1.0) - h2,
                "pair(" + std::to_string(lo) + "," + std::to_string(hi) + ")");
    }
    for (double beta : {0.1, 0.5, 1.0}) {
      const PBetaDensity pb(beta), p0(0.0);
      cb.margin(beta / 2.0 - hellinger_sq(pb, p0, aopt), "gamma7 beta=" + std::to_string(beta));
    }
    for (double beta : {0.0, 0.5, 1.0, 2.0, 5.0})
      for (double lam : {1.1, 1.5, 2.0})
        cb.margin(0.6 * (lam - 1.0) - pbeta_scale_hellinger_sq(beta, lam),
                  "scale beta=" + std::to_string(beta) + " lam=" + std::to_string(lam));
    report.checks.push_back(cb.done(quad_tol));
  }

  {  // sub-probability constraints of the constructed families
    CheckBuilder cb("subprob");
    Eigen::VectorXd g1(1);
    g1 << 0.0;
    LocationClass f0{"const", {Eigen::VectorXd::Zero(5)}, 3, 0.5};
    const PenalizedFamily scale = make_scale_family(
        {{std::make_shared<GaussianDensity>(0.0, 1.0), 0.5},
         {std::make_shared<LaplaceDensity>(0.0, 1.0), 0.5}},
        {f0}, -3, 3, 3, 5);
    cb.margin(1.0 - scale.delta_mass, "scale-family");

    const PenalizedFamily sparse = make_sparse_index_family(
        {[](double v) { return v; }},
        {[](double) { return 1.0; }, [](double w) { return w; },
         [](double w) { return w * w; }},
        Eigen::VectorXd::LinSpaced(3, -1.0, 1.0), 5, 2,
        std::make_shared<GaussianDensity>(0.0, 1.0));
    cb.margin(1.0 - sparse.delta_mass, "sparse-index-family");

    const BetaGrid bg = make_beta_grid(100);
    double gsum = 0.0;
    for (double g : bg.gamma) gsum += g;
    cb.margin(1.0 - gsum + 1e-12, "beta-grid");
    report.checks.push_back(cb.done(0.0));
  }

  return report;
}

bool InequalityReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

double estimate_wS(const ProductDensity& s, const ProductDensity& s_bar, const ModelNet& net,
                   double y, int reps, std::uint64_t seed, double tol) {
  net.check();
  const int n = s.dimension();
  if (s_bar.dimension() != n || net.dimension() != n)
    throw std::invalid_argument("estimate_wS: dimension mismatch");
  const AffinityOptions aopt{tol, 100000};
  const double base = product_hellinger_sq(s, s_bar, aopt);

  std::vector<int> ball;
  for (int j = 0; j < net.size(); ++j)
    if (product_hellinger_sq(s, net.points[j], aopt) + base <= y * y) ball.push_back(j);
  if (ball.empty()) return 0.0;

  // centering terms E_s psi(sqrt(t/s_bar)) per ball member
  std::vector<double> center(ball.size(), 0.0);
  for (std::size_t k = 0; k < ball.size(); ++k) {
    const ProductDensity& t = net.points[ball[k]];
    if (s.is_iid() && s_bar.is_iid() && t.is_iid())
      center[k] = n * expected_psi(s.coord(0), s_bar.coord(0), t.coord(0), tol);
    else
      for (int i = 0; i < n; ++i)
        center[k] += expected_psi(s.coord(i), s_bar.coord(i), t.coord(i), tol);
  }

  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    RandomStream rs(seed, static_cast<std::uint64_t>(r));
    std::vector<Obs> obs(n);
    for (int i = 0; i < n; ++i) obs[i] = s.coord(i).sample(rs);
    double sup = 0.0;
    for (std::size_t k = 0; k < ball.size(); ++k) {
      const ProductDensity& t = net.points[ball[k]];
      double z = 0.0;
      for (int i = 0; i < n; ++i)
        z += psi_of_sqrt_pair(std::sqrt(s_bar.coord(i).density(obs[i])),
                              std::sqrt(t.coord(i).density(obs[i])));
      sup = std::max(sup, std::fabs(z - center[k]));
    }
    total += sup;
  }
  return total / reps;
}

}  // namespace rho
