#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rho/criterion.hpp"
#include "rho/density.hpp"
#include "rho/random.hpp"

namespace rho {

// ---------------------------------------------------------------------------
// baseline estimators
// ---------------------------------------------------------------------------

double empirical_mean(const Sample& X);
/// Order statistic X_(n/2) for even n, X_((n+1)/2) for odd n (1-indexed).
double empirical_median(const Sample& X);
double midrange(const Sample& X);

enum class BaselineKind { Mean, Median, Midrange, MleGrid, LeastSquares, HistogramMle };

/// Model-side inputs a baseline may need: a net for the grid MLE, a design
/// for least squares, a partition for the histogram frequencies.
struct BaselineInputs {
  const ModelNet* net = nullptr;
  const Eigen::VectorXd* design = nullptr;
  const std::vector<double>* edges = nullptr;
};

struct BaselineEstimate {
  bool defined = true;       // false: unbounded likelihood, reported not thrown
  double scalar = 0.0;       // location estimates
  Eigen::VectorXd params;    // least squares (a, b) / histogram masses
  int index = -1;            // net index for the grid MLE
};

/// Uniform front end over the baseline estimators; throws std::invalid_argument
/// when the inputs lack what the kind requires.
BaselineEstimate baseline_estimate(BaselineKind kind, const Sample& X,
                                   const BaselineInputs& inputs = {});

struct MleGridResult {
  bool defined = true;  // false when the likelihood is unbounded on the net
  int index = -1;
  double log_likelihood = 0.0;
};
/// Maximizes the log likelihood over the net, lowest index on ties.
MleGridResult mle_grid(const Sample& X, const ModelNet& net);

/// (intercept, slope) of least squares for y_i = a + b x_i + eps_i.
Eigen::Vector2d least_squares_affine(const Sample& X, const Eigen::VectorXd& design);

/// Cell frequencies N_I / n over the partition given by `edges`.
Eigen::VectorXd histogram_mle(const Sample& X, const std::vector<double>& edges);

// ---------------------------------------------------------------------------
// scenarios
// ---------------------------------------------------------------------------

/// A fully seeded Monte-Carlo experiment; (scenario, seed) determines every
/// draw through per-replication substreams.
struct Scenario {
  std::string name = "scenario";
  std::string family = "translation";  // translation | linreg | sequence | histogram
  std::string error = "gauss";         // gauss | uniform | cauchy | laplace | pbeta
  double sigma = 1.0;                  // error scale (uniform: halfwidth)
  double pbeta = 1.0;                  // shape when error == "pbeta"

  double true_theta = 0.0;
  double contamination = 0.0;   // fraction of observations replaced by outliers
  double outlier_value = 50.0;  // absolute position of the outliers
  double grid_min = -0.55, grid_max = 0.55, grid_step = 1e-3;

  double true_a = 0.0, true_b = 0.0;  // linreg truth
  double a_half_range = 0.2, b_half_range = 0.3, ab_step = 0.02;

  std::vector<int> alphabet_theta;  // sequence truth (stem)
  int alphabet = 2, depth_cap = 60;

  std::vector<double> edges;    // histogram partition
  Eigen::VectorXd true_masses;  // histogram truth
  int resolution = 60;

  std::vector<int> ns = {100};
  int replications = 300;
  std::uint64_t seed = 20240801;
  std::vector<std::string> estimators = {"rho", "mean"};
  int threads = 0;
};

struct RiskRow {
  std::string scenario, estimator, loss;
  int n = 0, replications = 0;
  double mean = 0, std_err = 0, q05 = 0, q50 = 0, q95 = 0;
};

struct SlopeFit {
  std::string estimator, loss;
  double slope = 0, slope_se = 0;
};

struct RiskReport {
  std::vector<RiskRow> rows;
  std::vector<SlopeFit> slopes;  // OLS of log mean-loss on log n
  std::string to_csv() const;    // fixed column order, dot decimal
  const RiskRow* find(const std::string& estimator, const std::string& loss, int n) const;
  const SlopeFit* find_slope(const std::string& estimator, const std::string& loss) const;
};

RiskReport run_scenario(const Scenario& s);

/// Scenarios shipped with the CLI.
Scenario bundled_scenario(const std::string& name);
std::vector<std::string> bundled_scenario_names();

// ---------------------------------------------------------------------------
// numerical-inequality verification
// ---------------------------------------------------------------------------

struct InequalityCheck {
  std::string name;
  std::string detail;
  double worst_margin = 0.0;  // >= 0 means the inequality held with this slack
  bool pass = false;
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  bool all_pass() const;
};

/// Samples density pairs/triples from the model zoo and checks the criterion
/// bounds by quadrature, and the expectation bounds by Monte Carlo within
/// three standard errors. `budget` scales the Monte-Carlo replication count.
InequalityReport verify_inequalities(std::uint64_t seed, int budget = 10000, int threads = 0);

/// Monte-Carlo estimate of the expected supremum of |Z(X, s_bar, t)| over the
/// net points t with h2(s,t) + h2(s,s_bar) <= y^2; 0 when the ball is empty.
double estimate_wS(const ProductDensity& s, const ProductDensity& s_bar, const ModelNet& net,
                   double y, int reps, std::uint64_t seed, double tol = 1e-8);

}  // namespace rho
