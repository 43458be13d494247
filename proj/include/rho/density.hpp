#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rho {

class RandomStream;

/// One observed coordinate: a real value, a (covariate, response) pair for
/// random-design regression, or a symbol string for sequence spaces.
struct Obs {
  enum class Kind { Real, WY, Seq };
  Kind kind = Kind::Real;
  double x = 0.0;  // real value, or the response y
  double w = 0.0;  // covariate
  std::vector<int> seq;

  Obs() = default;
  Obs(double v) : kind(Kind::Real), x(v) {}  // NOLINT: implicit by design
  static Obs wy(double w_, double y_) {
    Obs o;
    o.kind = Kind::WY;
    o.w = w_;
    o.x = y_;
    return o;
  }
  static Obs sequence(std::vector<int> s) {
    Obs o;
    o.kind = Kind::Seq;
    o.seq = std::move(s);
    return o;
  }
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

class CoordinateDensity;
using DensityPtr = std::shared_ptr<const CoordinateDensity>;

/// A probability density on one coordinate space, w.r.t. Lebesgue measure,
/// counting measure, or nu (x) Lebesgue for random-design pairs. Immutable
/// after construction; all members are const-safe and thread-safe.
class CoordinateDensity {
 public:
  enum class Space { Real, WY, Seq };

  virtual ~CoordinateDensity() = default;

  virtual Space space() const { return Space::Real; }
  /// Density w.r.t. counting measure (atoms) rather than Lebesgue.
  virtual bool is_discrete() const { return false; }
  virtual double density(const Obs& o) const = 0;

  // -- support machinery for the numeric integration paths (Space::Real) --
  virtual Interval support() const { return {}; }
  /// Points where the density has a kink or jump; integrals split here.
  virtual std::vector<double> breakpoints() const { return {}; }
  /// Interval outside of which each tail carries mass at most eps.
  virtual Interval truncation(double eps) const;

  // -- closed-form hooks; nullopt falls back to quadrature / summation --
  virtual std::optional<double> affinity_to(const CoordinateDensity&) const {
    return std::nullopt;
  }
  /// Closed form for rho(this, (this + other)/2) when available.
  virtual std::optional<double> mixture_affinity_to(const CoordinateDensity&) const {
    return std::nullopt;
  }
  /// True only when rho(t, r) = rho(u, r), r = (t+u)/2, holds exactly for the
  /// pair (translated copies of one symmetric density, and sequence pairs).
  virtual bool mixture_symmetric_with(const CoordinateDensity&) const { return false; }
  /// True when the density is symmetric about some center.
  virtual bool symmetric() const { return false; }

  virtual bool can_sample() const { return false; }
  virtual Obs sample(RandomStream&) const;

  /// New density translated by delta (x -> x - delta under the curve).
  virtual DensityPtr translated(double delta) const;
  /// New density rescaled about 0: x -> x/lambda, mass preserved.
  virtual DensityPtr rescaled(double lambda) const;

  /// Structural identity; equal signatures mean equal densities.
  virtual std::string signature() const = 0;
};

// ---------------------------------------------------------------------------
// analytic location-scale families
// ---------------------------------------------------------------------------

class GaussianDensity final : public CoordinateDensity {
 public:
  GaussianDensity(double mean, double sigma);
  double density(const Obs& o) const override;
  Interval truncation(double eps) const override;
  std::optional<double> affinity_to(const CoordinateDensity&) const override;
  bool mixture_symmetric_with(const CoordinateDensity&) const override;
  bool symmetric() const override { return true; }
  bool can_sample() const override { return true; }
  Obs sample(RandomStream&) const override;
  DensityPtr translated(double delta) const override;
  DensityPtr rescaled(double lambda) const override;
  std::string signature() const override;
  double mean() const { return mean_; }
  double sigma() const { return sigma_; }

 private:
  double mean_, sigma_;
};

class LaplaceDensity final : public CoordinateDensity {
 public:
  LaplaceDensity(double loc, double scale);
  double density(const Obs& o) const override;
  std::vector<double> breakpoints() const override { return {loc_}; }
  Interval truncation(double eps) const override;
  std::optional<double> affinity_to(const CoordinateDensity&) const override;
  bool mixture_symmetric_with(const CoordinateDensity&) const override;
  bool symmetric() const override { return true; }
  bool can_sample() const override { return true; }
  Obs sample(RandomStream&) const override;
  DensityPtr translated(double delta) const override;
  DensityPtr rescaled(double lambda) const override;
  std::string signature() const override;
  double loc() const { return loc_; }
  double scale() const { return scale_; }

 private:
  double loc_, scale_;
};

class CauchyDensity final : public CoordinateDensity {
 public:
  CauchyDensity(double loc, double scale);
  double density(const Obs& o) const override;
  Interval truncation(double eps) const override;
  bool mixture_symmetric_with(const CoordinateDensity&) const override;
  bool symmetric() const override { return true; }
  bool can_sample() const override { return true; }
  Obs sample(RandomStream&) const override;
  DensityPtr translated(double delta) const override;
  DensityPtr rescaled(double lambda) const override;
  std::string signature() const override;
  double loc() const { return loc_; }
  double scale() const { return scale_; }

 private:
  double loc_, scale_;
};

/// Uniform on [center - halfwidth, center + halfwidth].
class UniformDensity final : public CoordinateDensity {
 public:
  UniformDensity(double center, double halfwidth);
  double density(const Obs& o) const override;
  Interval support() const override { return {center_ - hw_, center_ + hw_}; }
  std::vector<double> breakpoints() const override { return {center_ - hw_, center_ + hw_}; }
  Interval truncation(double) const override { return support(); }
  std::optional<double> affinity_to(const CoordinateDensity&) const override;
  std::optional<double> mixture_affinity_to(const CoordinateDensity&) const override;
  bool mixture_symmetric_with(const CoordinateDensity&) const override;
  bool symmetric() const override { return true; }
  bool can_sample() const override { return true; }
  Obs sample(RandomStream&) const override;
  DensityPtr translated(double delta) const override;
  DensityPtr rescaled(double lambda) const override;
  std::string signature() const override;
  double center() const { return center_; }
  double halfwidth() const { return hw_; }

 private:
  double center_, hw_;
};

/// density(x) = Lambda(beta) exp(-|x/scale|^(1/beta)) / scale, shifted by loc;
/// beta = 0 degenerates to the uniform density on [loc-scale, loc+scale].
class PBetaDensity final : public CoordinateDensity {
 public:
  explicit PBetaDensity(double beta, double loc = 0.0, double scale = 1.0);
  double density(const Obs& o) const override;
  Interval support() const override;
  std::vector<double> breakpoints() const override;
  Interval truncation(double eps) const override;
  std::optional<double> affinity_to(const CoordinateDensity&) const override;
  bool mixture_symmetric_with(const CoordinateDensity&) const override;
  bool symmetric() const override { return true; }
  bool can_sample() const override { return true; }
  Obs sample(RandomStream&) const override;
  DensityPtr translated(double delta) const override;
  DensityPtr rescaled(double lambda) const override;
  std::string signature() const override;
  double beta() const { return beta_; }
  double loc() const { return loc_; }
  double scale() const { return scale_; }
  /// 1 / (2 beta Gamma(beta)); 1/2 at beta = 0.
  static double normalization(double beta);

 private:
  double beta_, loc_, scale_, lambda_norm_;
};

/// density(x) = (1/4) |x - loc|^(-1/2) on [loc-1, loc+1]; the likelihood over
/// its translates is unbounded, which baseline MLE code must flag.
class InvSqrtDensity final : public CoordinateDensity {
 public:
  explicit InvSqrtDensity(double loc = 0.0);
  double density(const Obs& o) const override;
  Interval support() const override { return {loc_ - 1.0, loc_ + 1.0}; }
  std::vector<double> breakpoints() const override { return {loc_ - 1.0, loc_, loc_ + 1.0}; }
  Interval truncation(double) const override { return support(); }
  bool mixture_symmetric_with(const CoordinateDensity&) const override;
  bool symmetric() const override { return true; }
  bool can_sample() const override { return true; }
  Obs sample(RandomStream&) const override;
  DensityPtr translated(double delta) const override;
  std::string signature() const override;
  double loc() const { return loc_; }

 private:
  double loc_;
};

// ---------------------------------------------------------------------------
// piecewise-constant and discrete families
// ---------------------------------------------------------------------------

/// Piecewise constant w.r.t. Lebesgue measure: mass masses[i] spread evenly
/// over [edges[i], edges[i+1]). Affinities between histograms are exact sums.
class HistogramDensity final : public CoordinateDensity {
 public:
  HistogramDensity(std::vector<double> edges, Eigen::VectorXd masses);
  double density(const Obs& o) const override;
  Interval support() const override { return {edges_.front(), edges_.back()}; }
  std::vector<double> breakpoints() const override { return edges_; }
  Interval truncation(double) const override { return support(); }
  std::optional<double> affinity_to(const CoordinateDensity&) const override;
  std::optional<double> mixture_affinity_to(const CoordinateDensity&) const override;
  bool can_sample() const override { return true; }
  Obs sample(RandomStream&) const override;
  DensityPtr translated(double delta) const override;
  DensityPtr rescaled(double lambda) const override;
  std::string signature() const override;

  const std::vector<double>& edges() const { return edges_; }
  const Eigen::VectorXd& masses() const { return masses_; }
  int cells() const { return static_cast<int>(masses_.size()); }
  int cell_of(double x) const;  // -1 outside

 private:
  std::vector<double> edges_;
  Eigen::VectorXd masses_;
};

/// Explicit (atom, mass) table w.r.t. counting measure on the reals.
class TableDensity final : public CoordinateDensity {
 public:
  explicit TableDensity(std::vector<std::pair<double, double>> atoms);
  bool is_discrete() const override { return true; }
  double density(const Obs& o) const override;
  std::optional<double> affinity_to(const CoordinateDensity&) const override;
  std::optional<double> mixture_affinity_to(const CoordinateDensity&) const override;
  bool can_sample() const override { return true; }
  Obs sample(RandomStream&) const override;
  std::string signature() const override;
  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

 private:
  std::vector<std::pair<double, double>> atoms_;  // sorted by atom
};

/// Mass 2^-j on the length-j prefix of theta, for every j >= 1. theta is the
/// stored stem implicitly extended by the symbol 0.
class SequenceDensity final : public CoordinateDensity {
 public:
  SequenceDensity(std::vector<int> theta_stem, int alphabet_size, int depth_cap);
  Space space() const override { return Space::Seq; }
  bool is_discrete() const override { return true; }
  double density(const Obs& o) const override;
  std::optional<double> affinity_to(const CoordinateDensity&) const override;
  std::optional<double> mixture_affinity_to(const CoordinateDensity&) const override;
  bool mixture_symmetric_with(const CoordinateDensity&) const override;
  bool can_sample() const override { return true; }
  /// Draws a depth j with P(j) = 2^-j and returns the prefix. Throws if the
  /// drawn depth exceeds the depth cap.
  Obs sample(RandomStream&) const override;
  std::string signature() const override;

  int symbol_at(int k) const;  // 0-based; stem then implicit 0s
  /// Length of the common prefix with the other theta; INT_MAX when equal.
  int common_prefix(const SequenceDensity& other) const;
  int alphabet_size() const { return alphabet_; }
  int depth_cap() const { return depth_cap_; }
  const std::vector<int>& stem() const { return stem_; }

 private:
  std::vector<int> stem_;
  int alphabet_, depth_cap_;
};

/// Random-design coordinate density on pairs (w, y): q(y - g(w)) w.r.t.
/// nu (x) Lebesgue. The estimator never needs nu; a w-sampler may be attached
/// for simulation only.
class RegressionDensity final : public CoordinateDensity {
 public:
  RegressionDensity(DensityPtr error_density, std::function<double(double)> g,
                    std::string g_signature,
                    std::function<double(RandomStream&)> w_sampler = {});
  Space space() const override { return Space::WY; }
  double density(const Obs& o) const override;
  bool mixture_symmetric_with(const CoordinateDensity&) const override;
  bool can_sample() const override;
  Obs sample(RandomStream&) const override;
  std::string signature() const override;
  const CoordinateDensity& error_density() const { return *err_; }
  double g(double w) const { return g_(w); }

 private:
  DensityPtr err_;
  std::function<double(double)> g_;
  std::string g_sig_;
  std::function<double(RandomStream&)> w_sampler_;
};

// ---------------------------------------------------------------------------

/// An n-vector of coordinate densities; the object compared against a sample.
class ProductDensity {
 public:
  ProductDensity() = default;
  explicit ProductDensity(std::vector<DensityPtr> coords);
  static ProductDensity iid(DensityPtr d, int n);

  int dimension() const { return n_; }
  bool is_iid() const { return iid_; }
  const CoordinateDensity& coord(int i) const { return *coord_ptr(i); }
  const DensityPtr& coord_ptr(int i) const { return iid_ ? coords_[0] : coords_[i]; }
  std::string signature() const;

 private:
  std::vector<DensityPtr> coords_;
  int n_ = 0;
  bool iid_ = false;
};

/// Ordered observations, one per coordinate.
class Sample {
 public:
  Sample() = default;
  explicit Sample(std::vector<Obs> obs) : obs_(std::move(obs)) {}
  static Sample reals(const Eigen::VectorXd& xs);

  int size() const { return static_cast<int>(obs_.size()); }
  const Obs& operator[](int i) const { return obs_[i]; }
  Eigen::VectorXd reals() const;  // throws unless all coordinates are real
  std::vector<Obs>& mutable_obs() { return obs_; }
  const std::vector<Obs>& obs() const { return obs_; }

 private:
  std::vector<Obs> obs_;
};

}  // namespace rho
