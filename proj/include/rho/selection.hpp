#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "rho/criterion.hpp"
#include "rho/density.hpp"
#include "rho/random.hpp"

namespace rho {

/// A countable (here: finite) collection of nets with weights Delta obeying
/// sum exp(-Delta) <= 1, assembled into a deduplicated union net with the
/// pointwise penalty pen1.
struct PenalizedFamily {
  std::vector<ModelNet> models;
  std::vector<double> delta;
  double dimension_constant = 1.0;

  // assembled by finalize_family()
  ModelNet union_net;
  std::vector<std::vector<int>> owners;  // union index -> model indices
  std::vector<double> pen;               // pen1 over the union net
  double delta_mass = 0.0;               // sum exp(-Delta) over built models
  double dropped_delta_mass = 0.0;       // mass lost to index truncation
};

/// C vbar (1 + log+(n / vbar)); a linear span of dimension D has vbar = D + 2.
double vc_dimension_proxy(int v_bar, int n, double C);

/// Deduplicates the union net, checks the sub-probability constraint, and
/// computes pen1(t) = min over models containing t of (1/8) proxy + kappa Delta.
/// Every model must carry a dimension proxy.
void finalize_family(PenalizedFamily& family);

/// Pointwise penalty of an assembled family; throws on orphan points.
std::vector<double> pen1(const PenalizedFamily& family);

/// One location class of a scale family: candidate location vectors with a
/// VC index for the penalty and a prior weight.
struct LocationClass {
  std::string label;
  std::vector<Eigen::VectorXd> gs;  // each of length n
  int v_bar = 3;
  double pi = 1.0;
};

/// Models over the scale grid lambda_{i,j,k} = 2^j (1 + k 2^-i) for all
/// error densities q and location classes F, with weights
/// Delta = Delta_gamma(q) + Delta_pi(F) + |j| + i + 2 + i log 2.
PenalizedFamily make_scale_family(const std::vector<std::pair<DensityPtr, double>>& q_list,
                                  const std::vector<LocationClass>& f_list, int j_min, int j_max,
                                  int i_max, int n, double dimension_constant = 1.0,
                                  long max_points = 200000);

/// Random-design models F_{k,m} over sparse supports m (1 <= |m| <= cap) of M
/// basis functions composed with K monotone transforms;
/// pi(F_{k,m}) = [K M (e M / |m|)^|m|]^-1.
PenalizedFamily make_sparse_index_family(
    const std::vector<std::function<double(double)>>& transforms,
    const std::vector<std::function<double(double)>>& basis, const Eigen::VectorXd& coeff_grid,
    int n, int sparsity_cap, const DensityPtr& q, double dimension_constant = 1.0,
    const std::function<double(RandomStream&)>& w_sampler = {}, long max_points = 200000);

struct SelectResult {
  std::string model_label;
  int model_index = -1;     // owning model (lowest index)
  int union_index = -1;     // position in the union net
  ProductDensity point;
  Eigen::VectorXd upsilon_bar;
  std::vector<int> slack_set;
};

/// Minimizer of the penalized criterion over the family's union net, with
/// the kappa/10 slack set exposed.
SelectResult rho_select(const Sample& X, const PenalizedFamily& family,
                        const CriterionOptions& opt = {});

}  // namespace rho
