#include "rho/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rho/constants.hpp"

namespace rho {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// sum_i psi(sqrt(t'/t)(X_i)) from the square-root density columns;
// (b - a)/sqrt(a^2 + b^2) is psi of the ratio, 0 when both vanish.
// den == 0 forces num == 0, so bumping the denominator to 1 keeps the term
// exact while letting the loop vectorize.
double psi_sum(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double num = b[i] - a[i];
    const double den = a[i] * a[i] + b[i] * b[i];
    s += num / std::sqrt(den + static_cast<double>(den == 0.0));
  }
  return s;
}

// deterministic part of T for one point pair
double pair_dterm(const ProductDensity& t, const ProductDensity& u, const AffinityOptions& opt) {
  if (t.is_iid() && u.is_iid())
    return t.dimension() * deterministic_term(t.coord(0), u.coord(0), opt);
  double s = 0.0;
  for (int i = 0; i < t.dimension(); ++i) s += deterministic_term(t.coord(i), u.coord(i), opt);
  return s;
}

// square roots of the densities evaluated at the sample, one column per point
Eigen::MatrixXd sqrt_density_matrix(const Sample& X, const ModelNet& net) {
  const int n = X.size();
  const int S = net.size();
  Eigen::MatrixXd M(n, S);
  for (int p = 0; p < S; ++p) {
    const ProductDensity& pt = net.points[p];
    for (int i = 0; i < n; ++i) {
      double d = pt.coord(i).density(X[i]);
      if (d > 1e300) d = 1e300;  // integrable singularities stay finite here
      M(i, p) = std::sqrt(d);
    }
  }
  return M;
}

int resolve_threads(int requested, int jobs) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  return std::min(t, std::max(jobs, 1));
}

// rows are assigned tid, tid+T, tid+2T, ... so the partition is deterministic
template <typename Fn>
void parallel_rows(int rows, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (int r = 0; r < rows; ++r) fn(0, r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (int tid = 1; tid < threads; ++tid)
    pool.emplace_back([&, tid] {
      for (int r = tid; r < rows; r += threads) fn(tid, r);
    });
  for (int r = 0; r < rows; r += threads) fn(0, r);
  for (auto& th : pool) th.join();
}

void finalize_minimizers(CriterionTable& tbl) {
  const int S = static_cast<int>(tbl.upsilon.size());
  int arg = 0;
  for (int p = 1; p < S; ++p)
    if (tbl.upsilon[p] < tbl.upsilon[arg]) arg = p;
  tbl.argmin = arg;
  const double cutoff = tbl.upsilon[arg] + Constants::criterion_slack();
  tbl.slack_set.clear();
  for (int p = 0; p < S; ++p)
    if (tbl.upsilon[p] <= cutoff) tbl.slack_set.push_back(p);
}

void check_inputs(const Sample& X, const ModelNet& net) {
  net.check();
  if (X.size() != net.dimension())
    throw std::invalid_argument("criterion: sample length does not match the net dimension");
}

// shared sweep for the upsilon-only paths; pen == nullptr means unpenalized
Eigen::VectorXd sweep_upsilon(const Sample& X, const ModelNet& net,
                              const std::vector<double>* pen, const CriterionOptions& opt) {
  const int S = net.size();
  const int n = X.size();
  const Eigen::MatrixXd M = sqrt_density_matrix(X, net);
  const AffinityOptions aopt{opt.tol};
  const int threads = resolve_threads(opt.threads, S);

  Eigen::MatrixXd best(threads, S);
  best.setConstant(-std::numeric_limits<double>::infinity());
  parallel_rows(S, threads, [&](int tid, int p) {
    const double* mp = M.col(p).data();
    double row_best = best(tid, p);
    for (int q = p + 1; q < S; ++q) {
      const double t_pq =
          pair_dterm(net.points[p], net.points[q], aopt) + kInvSqrt2 * psi_sum(mp, M.col(q).data(), n);
      const double fwd = pen ? t_pq - (*pen)[q] : t_pq;
      const double bwd = pen ? -t_pq - (*pen)[p] : -t_pq;
      if (fwd > row_best) row_best = fwd;
      if (bwd > best(tid, q)) best(tid, q) = bwd;
    }
    best(tid, p) = row_best;
  });

  Eigen::VectorXd out(S);
  for (int p = 0; p < S; ++p) {
    double m = pen ? -(*pen)[p] : 0.0;  // the j = i term
    for (int tid = 0; tid < threads; ++tid) m = std::max(m, best(tid, p));
    out[p] = pen ? m + (*pen)[p] : m;
  }
  return out;
}

void check_penalty(const ModelNet& net, const std::vector<double>& pen) {
  if (static_cast<int>(pen.size()) != net.size())
    throw std::invalid_argument("penalty is missing values for some union-net points");
  for (double v : pen)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("penalty values must be finite and non-negative");
}

}  // namespace

void ModelNet::check() const {
  if (points.empty()) throw std::invalid_argument("ModelNet: empty net");
  const int n = points.front().dimension();
  for (const auto& p : points)
    if (p.dimension() != n)
      throw std::invalid_argument("ModelNet: points of differing dimensions");
  if (!params.empty() && params.size() != points.size())
    throw std::invalid_argument("ModelNet: params not aligned with points");
}

double varrho_population(const ProductDensity& s, const ProductDensity& t,
                         const ProductDensity& t_prime, const AffinityOptions& opt) {
  if (s.dimension() != t.dimension() || t.dimension() != t_prime.dimension())
    throw std::invalid_argument("varrho_population: dimension mismatch");
  const bool iid = s.is_iid() && t.is_iid() && t_prime.is_iid();
  const int reps = iid ? 1 : s.dimension();
  double total = 0.0;
  for (int i = 0; i < reps; ++i) {
    const CoordinateDensity& si = s.coord(i);
    const CoordinateDensity& ti = t.coord(i);
    const CoordinateDensity& ui = t_prime.coord(i);
    const double rho_tr = mixture_affinity(ti, ui, opt);

    double integral;
    const auto* ht = dynamic_cast<const HistogramDensity*>(&ti);
    const auto* hu = dynamic_cast<const HistogramDensity*>(&ui);
    const auto* hs = dynamic_cast<const HistogramDensity*>(&si);
    const auto* tt = dynamic_cast<const TableDensity*>(&ti);
    const auto* tu = dynamic_cast<const TableDensity*>(&ui);
    const auto* ts = dynamic_cast<const TableDensity*>(&si);
    if (ht && hu && hs) {
      std::vector<double> cuts = ht->edges();
      cuts.insert(cuts.end(), hu->edges().begin(), hu->edges().end());
      cuts.insert(cuts.end(), hs->edges().begin(), hs->edges().end());
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      integral = 0.0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        const double a = ht->density(Obs(mid)), b = hu->density(Obs(mid));
        const double r = 0.5 * (a + b);
        if (r == 0.0) continue;
        integral += std::sqrt(a / r) * hs->density(Obs(mid)) * (cuts[k + 1] - cuts[k]);
      }
    } else if (tt && tu && ts) {
      integral = 0.0;
      for (const auto& [x, m] : ts->atoms()) {
        const double a = tt->density(Obs(x)), b = tu->density(Obs(x));
        const double r = 0.5 * (a + b);
        if (r == 0.0) continue;
        integral += std::sqrt(a / r) * m;
      }
    } else {
      const Interval w = si.truncation(std::pow(opt.tol / 4.0, 2));
      const std::vector<double> bp = integration_seeds({&si, &ti, &ui}, w.lo, w.hi);
      QuadOptions qo{opt.tol, opt.max_intervals, true};
      auto f = [&](double x) {
        const Obs o(x);
        const double a = ti.density(o), b = ui.density(o);
        const double r = 0.5 * (a + b);
        if (r == 0.0) return 0.0;
        return std::sqrt(a / r) * si.density(o);
      };
      integral = integrate_with_breakpoints(f, w.lo, w.hi, bp, qo).value;
    }
    total += 0.5 * (rho_tr + integral);
  }
  return iid ? s.dimension() * total : total;
}

double varrho_empirical(const Sample& X, const ProductDensity& t, const ProductDensity& t_prime,
                        const AffinityOptions& opt) {
  if (X.size() != t.dimension() || t.dimension() != t_prime.dimension())
    throw std::invalid_argument("varrho_empirical: dimension mismatch");
  double total = 0.0;
  for (int i = 0; i < X.size(); ++i) {
    const CoordinateDensity& ti = t.coord(i);
    const CoordinateDensity& ui = t_prime.coord(i);
    const double a = ti.density(X[i]);
    const double b = ui.density(X[i]);
    const double r = 0.5 * (a + b);
    const double ratio = r == 0.0 ? 0.0 : std::sqrt(a / r);
    total += 0.5 * (mixture_affinity(ti, ui, opt) + ratio);
  }
  return total;
}

double t_statistic(const Sample& X, const ProductDensity& t, const ProductDensity& t_prime,
                   const AffinityOptions& opt) {
  if (X.size() != t.dimension() || t.dimension() != t_prime.dimension())
    throw std::invalid_argument("t_statistic: sample/point dimension mismatch");
  double psi_part = 0.0;
  for (int i = 0; i < X.size(); ++i) {
    double a = t.coord(i).density(X[i]);
    double b = t_prime.coord(i).density(X[i]);
    if (a > 1e300) a = 1e300;
    if (b > 1e300) b = 1e300;
    psi_part += psi_of_sqrt_pair(std::sqrt(a), std::sqrt(b));
  }
  return pair_dterm(t, t_prime, opt) + kInvSqrt2 * psi_part;
}

double t_statistic_deterministic(const ProductDensity& t, const ProductDensity& t_prime,
                                 const AffinityOptions& opt) {
  if (t.dimension() != t_prime.dimension())
    throw std::invalid_argument("t_statistic_deterministic: dimension mismatch");
  return pair_dterm(t, t_prime, opt);
}

double upsilon(const Sample& X, const ModelNet& net, int t_index, const CriterionOptions& opt) {
  check_inputs(X, net);
  if (t_index < 0 || t_index >= net.size())
    throw std::invalid_argument("upsilon: index out of range");
  const Eigen::MatrixXd M = sqrt_density_matrix(X, net);
  const AffinityOptions aopt{opt.tol};
  double best = 0.0;  // T(X, t, t) = 0
  for (int q = 0; q < net.size(); ++q) {
    if (q == t_index) continue;
    const double v = pair_dterm(net.points[t_index], net.points[q], aopt) +
                     kInvSqrt2 * psi_sum(M.col(t_index).data(), M.col(q).data(), X.size());
    best = std::max(best, v);
  }
  return best;
}

CriterionTable criterion_table(const Sample& X, const ModelNet& net, const CriterionOptions& opt) {
  check_inputs(X, net);
  const int S = net.size();
  const int n = X.size();
  CriterionTable tbl;

  if (S > opt.matrix_cap) {
    tbl.upsilon = sweep_upsilon(X, net, nullptr, opt);
    finalize_minimizers(tbl);
    return tbl;
  }

  const Eigen::MatrixXd M = sqrt_density_matrix(X, net);
  const AffinityOptions aopt{opt.tol};
  tbl.t_matrix = Eigen::MatrixXd::Zero(S, S);
  const int threads = resolve_threads(opt.threads, S);
  parallel_rows(S, threads, [&](int, int p) {
    const double* mp = M.col(p).data();
    for (int q = p + 1; q < S; ++q)
      tbl.t_matrix(p, q) = pair_dterm(net.points[p], net.points[q], aopt) +
                           kInvSqrt2 * psi_sum(mp, M.col(q).data(), n);
  });
  for (int p = 0; p < S; ++p)
    for (int q = p + 1; q < S; ++q) tbl.t_matrix(q, p) = -tbl.t_matrix(p, q);

  tbl.upsilon = tbl.t_matrix.rowwise().maxCoeff();
  finalize_minimizers(tbl);
  return tbl;
}

EstimateResult rho_estimate(const Sample& X, const ModelNet& net, const CriterionOptions& opt) {
  CriterionTable tbl = criterion_table(X, net, opt);
  EstimateResult res;
  res.index = tbl.argmin;
  res.point = net.points[tbl.argmin];
  res.table = std::move(tbl);
  return res;
}

double penalized_upsilon(const Sample& X, const ModelNet& union_net,
                         const std::vector<double>& pen, int t_index,
                         const CriterionOptions& opt) {
  check_inputs(X, union_net);
  check_penalty(union_net, pen);
  if (t_index < 0 || t_index >= union_net.size())
    throw std::invalid_argument("penalized_upsilon: index out of range");
  const Eigen::MatrixXd M = sqrt_density_matrix(X, union_net);
  const AffinityOptions aopt{opt.tol};
  double best = -pen[t_index];  // the t' = t term
  for (int q = 0; q < union_net.size(); ++q) {
    if (q == t_index) continue;
    const double v = pair_dterm(union_net.points[t_index], union_net.points[q], aopt) +
                     kInvSqrt2 * psi_sum(M.col(t_index).data(), M.col(q).data(), X.size());
    best = std::max(best, v - pen[q]);
  }
  return best + pen[t_index];
}

Eigen::VectorXd penalized_upsilon_all(const Sample& X, const ModelNet& union_net,
                                      const std::vector<double>& pen,
                                      const CriterionOptions& opt) {
  check_inputs(X, union_net);
  check_penalty(union_net, pen);
  return sweep_upsilon(X, union_net, &pen, opt);
}

}  // namespace rho
