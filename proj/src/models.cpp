#include "rho/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "rho/affinity.hpp"
#include "rho/constants.hpp"
#include "rho/quadrature.hpp"

namespace rho {

namespace {

Eigen::VectorXd single(double v) {
  Eigen::VectorXd x(1);
  x[0] = v;
  return x;
}

long lattice_size(int cells, int resolution) {
  // C(resolution + cells - 1, cells - 1), capped to avoid overflow
  long count = 1;
  for (int i = 1; i <= cells - 1; ++i) {
    count = count * (resolution + i) / i;
    if (count > 100000000L) return count;
  }
  return count;
}

}  // namespace

std::optional<OrderDecl> declared_order(const CoordinateDensity& q) {
  if (const auto* u = dynamic_cast<const UniformDensity*>(&q)) {
    const double a = 1.0 / (2.0 * u->halfwidth());
    return OrderDecl{0.0, a, a};  // h^2 = |delta|/(2 hw) ^ 1, exactly
  }
  if (const auto* g = dynamic_cast<const GaussianDensity*>(&q)) {
    // frozen from a sweep of h^2 = 1 - exp(-d^2 / (8 sigma^2))
    const double s2 = g->sigma() * g->sigma();
    return OrderDecl{1.0, 0.1 / s2, 0.35 / s2};
  }
  return std::nullopt;
}

ModelNet make_translation_net(const DensityPtr& q, double theta_min, double theta_max, double step,
                              int n, std::optional<OrderDecl> order) {
  if (!q) throw std::invalid_argument("make_translation_net: null density");
  if (!(step > 0)) throw std::invalid_argument("make_translation_net: step must be positive");
  if (n < 1) throw std::invalid_argument("make_translation_net: n must be >= 1");
  const long count = static_cast<long>(std::floor((theta_max - theta_min) / step + 1e-9)) + 1;
  if (count < 1) throw std::invalid_argument("make_translation_net: empty grid");

  if (!order) order = declared_order(*q);

  ModelNet net;
  net.label = "translation[" + q->signature() + "]";
  net.points.reserve(count);
  net.params.reserve(count);
  for (long k = 0; k < count; ++k) {
    const double theta = theta_min + step * static_cast<double>(k);
    net.points.push_back(ProductDensity::iid(q->translated(theta), n));
    net.params.push_back(single(theta));
  }
  if (order)
    net.eta = std::sqrt(order->A_q) * std::pow(step, 0.5 * (1.0 + order->alpha));
  return net;
}

ModelNet make_histogram_net(const std::vector<double>& edges, int resolution, int n,
                            long max_points) {
  const int cells = static_cast<int>(edges.size()) - 1;
  if (cells < 2) throw std::invalid_argument("make_histogram_net: need at least 2 cells");
  if (resolution < 1) throw std::invalid_argument("make_histogram_net: resolution must be >= 1");
  if (n < 1) throw std::invalid_argument("make_histogram_net: n must be >= 1");
  const long count = lattice_size(cells, resolution);
  if (count > max_points)
    throw std::invalid_argument("make_histogram_net: lattice of " + std::to_string(count) +
                                " points exceeds the cap of " + std::to_string(max_points));

  ModelNet net;
  net.label = "histogram[" + std::to_string(cells) + "cells/" + std::to_string(resolution) + "]";
  net.points.reserve(count);
  net.params.reserve(count);

  // compositions of `resolution` into `cells` parts, lexicographic in (k_0, ...)
  const double delta = 1.0 / resolution;
  std::vector<int> k(cells, 0);
  std::function<void(int, int)> emit = [&](int cell, int remaining) {
    if (cell == cells - 1) {
      k[cell] = remaining;
      Eigen::VectorXd masses(cells);
      for (int c = 0; c < cells; ++c)
        masses[c] = static_cast<double>(k[c]) / static_cast<double>(resolution);
      masses[cells - 1] = std::max(0.0, 1.0 - masses.head(cells - 1).sum());
      net.points.push_back(
          ProductDensity::iid(std::make_shared<HistogramDensity>(edges, masses), n));
      net.params.push_back(masses);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[cell] = v;
      emit(cell + 1, remaining - v);
    }
  };
  emit(0, resolution);

  const Constants& K = Constants::get();
  net.dimension_proxy = 6.0 / (K.c0 * K.c0) * cells;
  // one lattice move shifts at most 1/resolution of mass between two cells
  net.eta = std::sqrt(n * 0.5 * cells * delta);
  return net;
}

DensityPtr make_pbeta(double beta) { return std::make_shared<PBetaDensity>(beta); }

double pbeta_scale_hellinger_sq(double beta, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("pbeta_scale_hellinger_sq: lambda must be > 0");
  const PBetaDensity base(beta);
  const PBetaDensity scaled(beta, 0.0, lambda);
  return 1.0 - *base.affinity_to(scaled);
}

BetaGrid make_beta_grid(int n, double beta_max) {
  if (n < 3) throw std::invalid_argument("make_beta_grid: n must be >= 3");
  BetaGrid g;
  // geometric block on [0, 1]
  g.betas.push_back(0.0);
  double b = 2.0 / n;
  const double growth = 1.0 + std::sqrt(6.0 / (13.0 * n));
  while (b < 1.0) {
    g.betas.push_back(b);
    b *= growth;
  }
  g.betas.push_back(1.0);
  // arithmetic block on (1, 3)
  const double step2 = 2.0 / std::sqrt(7.0 * n);
  b = 1.0 + step2;
  while (b < 3.0) {
    g.betas.push_back(b);
    b += step2;
  }
  // slowly widening block on [3, beta_max]
  const double c13 = 1.3 * std::sqrt(static_cast<double>(n));
  for (long j = 0;; ++j) {
    const double alpha_j = std::log(3.0 + static_cast<double>(j) / c13);
    const double bj = 3.0 + static_cast<double>(j) / (c13 * alpha_j);
    if (bj > beta_max) break;
    g.betas.push_back(bj);
  }

  double raw = 0.0;
  std::vector<double> w(g.betas.size());
  const double light = 1.0 / (std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n)));
  for (std::size_t i = 0; i < g.betas.size(); ++i) {
    const double bi = g.betas[i];
    w[i] = bi <= 3.0 ? light : 1.0 / (n * (bi - 3.0) * (bi - 3.0));
    raw += w[i];
  }
  g.gamma.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g.gamma[i] = w[i] / raw;
  return g;
}

DensityPtr make_sequence_truth(std::vector<int> theta, int alphabet_size, int depth_cap) {
  return std::make_shared<SequenceDensity>(std::move(theta), alphabet_size, depth_cap);
}

ModelNet make_sequence_net(const Sample& X, int alphabet_size, int depth_cap, int n) {
  if (X.size() != n)
    throw std::invalid_argument("make_sequence_net: sample length does not match n");
  std::set<std::vector<int>> stems;
  for (int a = 0; a < alphabet_size; ++a) stems.insert({a});
  for (int i = 0; i < n; ++i) {
    const Obs& o = X[i];
    if (o.kind != Obs::Kind::Seq)
      throw std::invalid_argument("make_sequence_net: non-sequence observation");
    for (std::size_t len = 1; len <= o.seq.size(); ++len)
      stems.insert(std::vector<int>(o.seq.begin(), o.seq.begin() + len));
  }
  std::vector<std::vector<int>> ordered(stems.begin(), stems.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });

  ModelNet net;
  net.label = "sequence";
  for (auto& stem : ordered) {
    Eigen::VectorXd par(stem.size());
    for (std::size_t k = 0; k < stem.size(); ++k) par[k] = stem[k];
    net.points.push_back(ProductDensity::iid(
        std::make_shared<SequenceDensity>(std::move(stem), alphabet_size, depth_cap), n));
    net.params.push_back(par);
  }
  // the data-restricted candidate set makes no uniform covering claim
  net.eta = std::nullopt;
  return net;
}

namespace {

// cartesian product of the per-dimension grids, first grid outermost
void enumerate_grid(const std::vector<Eigen::VectorXd>& grids,
                    const std::function<void(const Eigen::VectorXd&)>& visit, long max_points) {
  const int d = static_cast<int>(grids.size());
  long total = 1;
  for (const auto& g : grids) {
    if (g.size() == 0) throw std::invalid_argument("coefficient grid dimension is empty");
    total *= g.size();
    if (total > max_points)
      throw std::invalid_argument("coefficient grid of " + std::to_string(total) +
                                  "+ points exceeds the cap");
  }
  std::vector<int> idx(d, 0);
  Eigen::VectorXd beta(d);
  for (;;) {
    for (int j = 0; j < d; ++j) beta[j] = grids[j][idx[j]];
    visit(beta);
    int j = d - 1;
    while (j >= 0 && ++idx[j] == grids[j].size()) idx[j--] = 0;
    if (j < 0) break;
  }
}

std::string coeff_signature(const Eigen::VectorXd& beta) {
  std::string s;
  char buf[40];
  for (int j = 0; j < beta.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g,", beta[j]);
    s += buf;
  }
  return s;
}

}  // namespace

ModelNet make_fixed_design_net(const DensityPtr& q, const Eigen::MatrixXd& basis,
                               const std::vector<Eigen::VectorXd>& coeff_grids,
                               const std::function<double(double)>& transform, long max_points) {
  if (!q) throw std::invalid_argument("make_fixed_design_net: null error density");
  const int n = static_cast<int>(basis.rows());
  if (n < 1) throw std::invalid_argument("make_fixed_design_net: empty design");
  if (static_cast<int>(coeff_grids.size()) != basis.cols())
    throw std::invalid_argument("make_fixed_design_net: one grid per basis vector required");

  ModelNet net;
  net.label = "fixed-design[" + q->signature() + "]";
  enumerate_grid(
      coeff_grids,
      [&](const Eigen::VectorXd& beta) {
        Eigen::VectorXd g = basis * beta;
        if (transform)
          for (int i = 0; i < n; ++i) g[i] = transform(g[i]);
        std::vector<DensityPtr> coords;
        coords.reserve(n);
        for (int i = 0; i < n; ++i) coords.push_back(q->translated(g[i]));
        net.points.emplace_back(std::move(coords));
        net.params.push_back(beta);
      },
      max_points);
  return net;
}

ModelNet make_random_design_net(const DensityPtr& q,
                                const std::vector<std::function<double(double)>>& basis,
                                const std::vector<Eigen::VectorXd>& coeff_grids, int n,
                                const std::function<double(double)>& transform,
                                const std::function<double(RandomStream&)>& w_sampler,
                                long max_points) {
  if (!q) throw std::invalid_argument("make_random_design_net: null error density");
  if (!q->symmetric())
    throw std::invalid_argument("make_random_design_net: the error density must be symmetric");
  if (basis.size() != coeff_grids.size())
    throw std::invalid_argument("make_random_design_net: one grid per basis function required");

  ModelNet net;
  net.label = "random-design[" + q->signature() + "]";
  enumerate_grid(
      coeff_grids,
      [&](const Eigen::VectorXd& beta) {
        // capture the regression function by value
        Eigen::VectorXd coeffs = beta;
        auto fns = basis;
        auto tr = transform;
        auto g = [coeffs, fns, tr](double w) {
          double v = 0.0;
          for (std::size_t j = 0; j < fns.size(); ++j) v += coeffs[j] * fns[j](w);
          return tr ? tr(v) : v;
        };
        net.points.push_back(ProductDensity::iid(
            std::make_shared<RegressionDensity>(q, g, coeff_signature(beta), w_sampler), n));
        net.params.push_back(beta);
      },
      max_points);
  return net;
}

Eigen::VectorXd affine_design(int n) {
  Eigen::VectorXd x(n);
  for (int i = 1; i <= n; ++i) x[i - 1] = static_cast<double>(2 * i - n - 1) / n;
  return x;
}

double d_loss(const Eigen::VectorXd& f, const Eigen::VectorXd& g, double alpha, double A_q) {
  if (f.size() != g.size()) throw std::invalid_argument("d_loss: length mismatch");
  if (!(alpha > -1.0 && alpha <= 1.0)) throw std::invalid_argument("d_loss: alpha outside (-1,1]");
  if (!(A_q > 0)) throw std::invalid_argument("d_loss: A_q must be positive");
  const double cap = 1.0 / A_q;
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i)
    s += std::min(std::pow(std::fabs(f[i] - g[i]), 1.0 + alpha), cap);
  return s;
}

double random_design_hellinger_sq(const CoordinateDensity& q,
                                  const std::function<double(double)>& g,
                                  const std::function<double(double)>& g_prime, double tol) {
  auto f = [&](double w) {
    const DensityPtr a = q.translated(g(w));
    const DensityPtr b = q.translated(g_prime(w));
    return hellinger_sq(*a, *b, {tol, 100000});
  };
  return integrate(f, 0.0, 1.0, {tol, 20000, true}).value;
}

}  // namespace rho
