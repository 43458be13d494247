#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "rho/affinity.hpp"
#include "rho/density.hpp"

namespace rho {

/// A finite indexed set of candidate product densities with net bookkeeping.
struct ModelNet {
  std::vector<ProductDensity> points;
  std::vector<Eigen::VectorXd> params;   // per-point parameters, for reporting
  std::optional<double> eta;             // claimed Hellinger net resolution
  std::optional<double> dimension_proxy; // complexity charge used by penalties
  std::string label;

  int size() const { return static_cast<int>(points.size()); }
  int dimension() const { return points.empty() ? 0 : points.front().dimension(); }
  void check() const;  // non-empty, consistent dimensions, params aligned
};

/// Pairwise criterion statistics over one net. The matrix is antisymmetric
/// with zero diagonal; it is omitted (size 0) above CriterionOptions::matrix_cap
/// to keep large runs in memory, upsilon and the minimizers are always filled.
struct CriterionTable {
  Eigen::MatrixXd t_matrix;
  Eigen::VectorXd upsilon;      // per-point sup_j T(X, t_i, t_j) >= 0
  std::vector<int> slack_set;   // upsilon <= min + kappa/10, ascending indices
  int argmin = -1;              // lowest-index exact minimizer
  bool has_matrix() const { return t_matrix.size() > 0; }
};

struct CriterionOptions {
  double tol = 1e-9;      // tolerance for deterministic-term integrals
  int threads = 0;        // 0 = hardware concurrency
  int matrix_cap = 2600;  // largest net size for which t_matrix is stored
};

/// Population criterion mean: sum_i (1/2)[rho(t_i, r_i) + int sqrt(t_i/r_i) s_i],
/// r = (t + t')/2, with t/r = 0 where t = t' = 0. Test oracle only.
double varrho_population(const ProductDensity& s, const ProductDensity& t,
                         const ProductDensity& t_prime, const AffinityOptions& opt = {});

/// Empirical counterpart: sum_i (1/2)[rho(t_i, r_i) + sqrt(t_i/r_i)(X_i)],
/// an unbiased estimator of varrho_population.
double varrho_empirical(const Sample& X, const ProductDensity& t, const ProductDensity& t_prime,
                        const AffinityOptions& opt = {});

/// T(X, t, t') = (1/2) sum_i [rho(t'_i, r_i) - rho(t_i, r_i)]
///             + (1/sqrt 2) sum_i psi(sqrt(t'_i/t_i)(X_i)).
double t_statistic(const Sample& X, const ProductDensity& t, const ProductDensity& t_prime,
                   const AffinityOptions& opt = {});

/// The sample-free part of T(X, t, t'), for callers that evaluate T many
/// times against the same pair.
double t_statistic_deterministic(const ProductDensity& t, const ProductDensity& t_prime,
                                 const AffinityOptions& opt = {});

/// sup over the net of T(X, t_index, .); always >= 0.
double upsilon(const Sample& X, const ModelNet& net, int t_index,
               const CriterionOptions& opt = {});

CriterionTable criterion_table(const Sample& X, const ModelNet& net,
                               const CriterionOptions& opt = {});

struct EstimateResult {
  int index = -1;
  ProductDensity point;
  CriterionTable table;
};

/// Exact minimizer of upsilon over the net (lowest index on ties), with the
/// slack set exposed through the table.
EstimateResult rho_estimate(const Sample& X, const ModelNet& net,
                            const CriterionOptions& opt = {});

/// Penalized criterion over a union net:
///   max_j { T(X, t_i, t_j) - pen[j] } + pen[i],  the max including j = i.
double penalized_upsilon(const Sample& X, const ModelNet& union_net,
                         const std::vector<double>& pen, int t_index,
                         const CriterionOptions& opt = {});

/// All penalized-criterion values at once (one pass over the pair table).
Eigen::VectorXd penalized_upsilon_all(const Sample& X, const ModelNet& union_net,
                                      const std::vector<double>& pen,
                                      const CriterionOptions& opt = {});

}  // namespace rho
