#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "rho/criterion.hpp"
#include "rho/density.hpp"
#include "rho/random.hpp"

namespace rho {

/// Local Hellinger modulus of a translation family:
/// a_q [|u-v|^(1+alpha) ^ A_q^-1] <= h^2(q_u, q_v) <= A_q [|u-v|^(1+alpha) ^ A_q^-1].
struct OrderDecl {
  double alpha;
  double a_q;
  double A_q;
};

/// Known order constants: exact for the uniform family, frozen from a
/// numerical sweep for the Gaussian one. nullopt for everything else.
std::optional<OrderDecl> declared_order(const CoordinateDensity& q);

/// Grid of translates of q: one i.i.d. product per theta in
/// {theta_min, theta_min + step, ...} up to theta_max.
ModelNet make_translation_net(const DensityPtr& q, double theta_min, double theta_max,
                              double step, int n,
                              std::optional<OrderDecl> order = std::nullopt);

/// All simplex lattice points at resolution 1/resolution over the partition;
/// throws when the lattice would exceed max_points.
ModelNet make_histogram_net(const std::vector<double>& edges, int resolution, int n,
                            long max_points = 200000);

DensityPtr make_pbeta(double beta);

/// Closed-form h^2 between the beta-exponential density and its rescaling
/// by lambda; valid for all lambda > 0 through the h(lambda) = h(1/lambda)
/// scale symmetry, with beta = 0 handled directly.
double pbeta_scale_hellinger_sq(double beta, double lambda);

/// Discretization of the beta half-line with its sub-probability weights.
struct BetaGrid {
  std::vector<double> betas;
  std::vector<double> gamma;   // positive, sums to <= 1
};
BetaGrid make_beta_grid(int n, double beta_max = 20.0);

DensityPtr make_sequence_truth(std::vector<int> theta, int alphabet_size, int depth_cap);

/// Net of candidate sequences: the alphabet singletons plus every prefix of
/// an observed sequence, in a fixed (length, lexicographic) enumeration.
ModelNet make_sequence_net(const Sample& X, int alphabet_size, int depth_cap, int n);

/// Fixed-design regression net: one product per coefficient vector in the
/// cartesian grid, with coordinates q(. - transform(sum_j beta_j basis(i,j))).
ModelNet make_fixed_design_net(const DensityPtr& q, const Eigen::MatrixXd& basis,
                               const std::vector<Eigen::VectorXd>& coeff_grids,
                               const std::function<double(double)>& transform = {},
                               long max_points = 200000);

/// Random-design analogue on (w, y) pairs; requires a symmetric error density.
ModelNet make_random_design_net(const DensityPtr& q,
                                const std::vector<std::function<double(double)>>& basis,
                                const std::vector<Eigen::VectorXd>& coeff_grids, int n,
                                const std::function<double(double)>& transform = {},
                                const std::function<double(RandomStream&)>& w_sampler = {},
                                long max_points = 200000);

/// The balanced design x_i = (2i - n - 1)/n, i = 1..n.
Eigen::VectorXd affine_design(int n);

/// sum_i (|f_i - g_i|^(1+alpha) ^ A_q^-1).
double d_loss(const Eigen::VectorXd& f, const Eigen::VectorXd& g, double alpha, double A_q);

/// Random-design loss between two regression functions under the design
/// measure nu = uniform on [0,1]: int h^2(q(.-g(w)), q(.-g'(w))) dnu(w).
double random_design_hellinger_sq(const CoordinateDensity& q,
                                  const std::function<double(double)>& g,
                                  const std::function<double(double)>& g_prime,
                                  double tol = 1e-9);

}  // namespace rho
