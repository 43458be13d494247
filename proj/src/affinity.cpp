#include "rho/affinity.hpp"

#include <algorithm>
#include <stdexcept>

namespace rho {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_space(const CoordinateDensity& a, const CoordinateDensity& b) {
  return a.space() == b.space() && a.is_discrete() == b.is_discrete();
}

const TableDensity* as_table(const CoordinateDensity& d) {
  return dynamic_cast<const TableDensity*>(&d);
}

}  // namespace

std::vector<double> integration_seeds(const std::vector<const CoordinateDensity*>& ds, double lo,
                                      double hi) {
  std::vector<double> pts;
  double core_lo = std::numeric_limits<double>::infinity();
  double core_hi = -std::numeric_limits<double>::infinity();
  for (const CoordinateDensity* d : ds) {
    const auto bp = d->breakpoints();
    pts.insert(pts.end(), bp.begin(), bp.end());
    const Interval c = d->truncation(1e-4);
    core_lo = std::min(core_lo, c.lo);
    core_hi = std::max(core_hi, c.hi);
  }
  core_lo = std::max(core_lo, lo);
  core_hi = std::min(core_hi, hi);
  if (!(core_lo < core_hi)) {
    core_lo = lo;
    core_hi = hi;
  }
  pts.push_back(core_lo);
  pts.push_back(core_hi);
  double w = std::max(core_hi - core_lo, 1e-3);
  for (double x = core_hi; x < hi;) {
    x = std::min(x + w, hi);
    pts.push_back(x);
    w *= 2.0;
  }
  w = std::max(core_hi - core_lo, 1e-3);
  for (double x = core_lo; x > lo;) {
    x = std::max(x - w, lo);
    pts.push_back(x);
    w *= 2.0;
  }
  return pts;
}

double psi(double u) {
  if (std::isnan(u) || u < 0.0) throw std::domain_error("psi: argument must be in [0, +inf]");
  if (std::isinf(u)) return 1.0;
  return (u - 1.0) / std::sqrt(1.0 + u * u);
}

double likelihood_ratio_sqrt(const CoordinateDensity& t, const CoordinateDensity& t_prime,
                             const Obs& x) {
  const double a = t.density(x);
  const double b = t_prime.density(x);
  if (a == 0.0 && b == 0.0) return 1.0;
  if (a == 0.0) return kInf;
  if (b == 0.0) return 0.0;
  return std::sqrt(b / a);
}

double hellinger_affinity(const CoordinateDensity& t, const CoordinateDensity& u,
                          const AffinityOptions& opt) {
  if (&t == &u) return 1.0;
  if (!same_space(t, u))
    throw std::invalid_argument("hellinger_affinity: incompatible supports");
  if (auto hook = t.affinity_to(u)) return *hook;
  if (auto hook = u.affinity_to(t)) return *hook;

  if (t.is_discrete()) {
    const TableDensity* ta = as_table(t);
    const TableDensity* ub = as_table(u);
    if (!ta || !ub)
      throw std::invalid_argument("hellinger_affinity: discrete pair without exact hook");
    double rho = 0.0;
    for (const auto& [x, m] : ta->atoms()) {
      const double mu = ub->density(Obs(x));
      if (mu > 0.0) rho += std::sqrt(m * mu);
    }
    return rho;
  }

  if (t.space() != CoordinateDensity::Space::Real)
    throw std::invalid_argument("hellinger_affinity: no numeric path for this space");

  // per-side truncation error is bounded by sqrt(eps) via Cauchy-Schwarz
  const double eps = std::pow(opt.tol / 4.0, 2);
  const Interval ta = t.truncation(eps);
  const Interval tb = u.truncation(eps);
  const Interval w{std::max(ta.lo, tb.lo), std::min(ta.hi, tb.hi)};
  if (!(w.lo < w.hi)) return 0.0;
  QuadOptions qo{opt.tol, opt.max_intervals, true};
  auto f = [&](double x) { return std::sqrt(t.density(Obs(x)) * u.density(Obs(x))); };
  QuadResult r = integrate_with_breakpoints(f, w.lo, w.hi, integration_seeds({&t, &u}, w.lo, w.hi), qo);
  return std::clamp(r.value, 0.0, 1.0);
}

double hellinger_sq(const CoordinateDensity& t, const CoordinateDensity& u,
                    const AffinityOptions& opt) {
  return 1.0 - hellinger_affinity(t, u, opt);
}

double product_hellinger_sq(const ProductDensity& t, const ProductDensity& u,
                            const AffinityOptions& opt) {
  if (t.dimension() != u.dimension())
    throw std::invalid_argument("product_hellinger_sq: dimension mismatch");
  if (t.is_iid() && u.is_iid())
    return t.dimension() * hellinger_sq(t.coord(0), u.coord(0), opt);
  double sum = 0.0;
  for (int i = 0; i < t.dimension(); ++i) sum += hellinger_sq(t.coord(i), u.coord(i), opt);
  return sum;
}

double mixture_affinity(const CoordinateDensity& t, const CoordinateDensity& t_prime,
                        const AffinityOptions& opt) {
  if (&t == &t_prime) return 1.0;
  if (!same_space(t, t_prime))
    throw std::invalid_argument("mixture_affinity: incompatible supports");
  if (auto hook = t.mixture_affinity_to(t_prime)) return *hook;
  if (t.signature() == t_prime.signature()) return 1.0;

  if (t.is_discrete()) {
    const TableDensity* ta = as_table(t);
    const TableDensity* ub = as_table(t_prime);
    if (!ta || !ub)
      throw std::invalid_argument("mixture_affinity: discrete pair without exact hook");
    double rho = 0.0;
    for (const auto& [x, m] : ta->atoms())
      rho += std::sqrt(m * 0.5 * (m + ub->density(Obs(x))));
    return rho;
  }

  if (t.space() != CoordinateDensity::Space::Real)
    throw std::invalid_argument("mixture_affinity: no numeric path for this space");

  // the integrand sqrt(t r) vanishes with t, so t's own truncation suffices
  const Interval win = t.truncation(std::pow(opt.tol / 4.0, 2));
  if (!(win.lo < win.hi)) return 0.0;
  QuadOptions qo{opt.tol, opt.max_intervals, true};
  auto f = [&](double x) {
    const double a = t.density(Obs(x));
    if (a == 0.0) return 0.0;
    const double r = 0.5 * (a + t_prime.density(Obs(x)));
    return std::sqrt(a * r);
  };
  QuadResult res = integrate_with_breakpoints(
      f, win.lo, win.hi, integration_seeds({&t, &t_prime}, win.lo, win.hi), qo);
  return std::clamp(res.value, 0.0, 1.0);
}

double deterministic_term(const CoordinateDensity& t, const CoordinateDensity& t_prime,
                          const AffinityOptions& opt) {
  if (&t == &t_prime) return 0.0;
  if (t.mixture_symmetric_with(t_prime)) return 0.0;
  const auto ht = t.mixture_affinity_to(t_prime);
  const auto hu = t_prime.mixture_affinity_to(t);
  if (ht && hu) return 0.5 * (*hu - *ht);
  if (t.is_discrete() || t.space() != CoordinateDensity::Space::Real)
    return 0.5 * (mixture_affinity(t_prime, t, opt) - mixture_affinity(t, t_prime, opt));

  // single integral of sqrt(r) (sqrt(t') - sqrt(t)) over the support hull
  const double eps = std::pow(opt.tol / 4.0, 2);
  const Interval tw = t.truncation(eps), uw = t_prime.truncation(eps);
  const Interval w{std::min(tw.lo, uw.lo), std::max(tw.hi, uw.hi)};
  QuadOptions qo{opt.tol, opt.max_intervals, true};
  auto f = [&](double x) {
    const double a = t.density(Obs(x));
    const double b = t_prime.density(Obs(x));
    if (a == 0.0 && b == 0.0) return 0.0;
    return std::sqrt(0.5 * (a + b)) * (std::sqrt(b) - std::sqrt(a));
  };
  QuadResult res = integrate_with_breakpoints(
      f, w.lo, w.hi, integration_seeds({&t, &t_prime}, w.lo, w.hi), qo);
  return 0.5 * res.value;
}

double kl_divergence(const CoordinateDensity& t, const CoordinateDensity& u,
                     const AffinityOptions& opt) {
  if (!same_space(t, u)) throw std::invalid_argument("kl_divergence: incompatible supports");
  if (t.signature() == u.signature()) return 0.0;

  if (const auto* st = dynamic_cast<const SequenceDensity*>(&t)) {
    const auto* su = dynamic_cast<const SequenceDensity*>(&u);
    if (!su) throw std::invalid_argument("kl_divergence: incompatible supports");
    return st->common_prefix(*su) == std::numeric_limits<int>::max() ? 0.0 : kInf;
  }

  if (t.is_discrete()) {
    const TableDensity* ta = as_table(t);
    const TableDensity* ub = as_table(u);
    if (!ta || !ub) throw std::invalid_argument("kl_divergence: discrete pair without atoms");
    double kl = 0.0;
    for (const auto& [x, m] : ta->atoms()) {
      if (m == 0.0) continue;
      const double mu = ub->density(Obs(x));
      if (mu == 0.0) return kInf;
      kl += m * std::log(m / mu);
    }
    return std::max(kl, 0.0);
  }

  // piecewise-constant pair: exact through the merged partition
  if (const auto* ht = dynamic_cast<const HistogramDensity*>(&t)) {
    if (const auto* hu = dynamic_cast<const HistogramDensity*>(&u)) {
      double kl = 0.0;
      std::vector<double> cuts = ht->edges();
      cuts.insert(cuts.end(), hu->edges().begin(), hu->edges().end());
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double dt = ht->density(Obs(mid));
        if (dt == 0.0) continue;
        const double du = hu->density(Obs(mid));
        if (du == 0.0) return kInf;
        kl += dt * std::log(dt / du) * len;
      }
      return std::max(kl, 0.0);
    }
  }

  if (t.space() != CoordinateDensity::Space::Real)
    throw std::invalid_argument("kl_divergence: no numeric path for this space");

  const double eps = opt.tol * 1e-3;
  const Interval w = t.truncation(eps);
  bool dominated = true;
  auto f = [&](double x) {
    const double a = t.density(Obs(x));
    if (a <= 0.0) return 0.0;
    const double b = u.density(Obs(x));
    if (b == 0.0) {
      dominated = false;
      return 0.0;
    }
    return a * std::log(a / b);
  };
  QuadOptions qo{std::max(opt.tol, 1e-8), opt.max_intervals, true};
  QuadResult r =
      integrate_with_breakpoints(f, w.lo, w.hi, integration_seeds({&t, &u}, w.lo, w.hi), qo);
  if (!dominated) return kInf;
  return std::max(r.value, 0.0);
}

double total_mass(const CoordinateDensity& t, const AffinityOptions& opt) {
  if (const auto* ta = as_table(t)) {
    double m = 0.0;
    for (const auto& [x, mass] : ta->atoms()) m += mass;
    return m;
  }
  if (const auto* st = dynamic_cast<const SequenceDensity*>(&t)) {
    (void)st;
    return 1.0;  // geometric masses over the prefix chain
  }
  if (t.space() != CoordinateDensity::Space::Real)
    throw std::invalid_argument("total_mass: no numeric path for this space");
  const Interval w = t.truncation(std::pow(opt.tol / 4.0, 2));
  QuadOptions qo{opt.tol, opt.max_intervals, true};
  auto f = [&](double x) { return t.density(Obs(x)); };
  return integrate_with_breakpoints(f, w.lo, w.hi, integration_seeds({&t}, w.lo, w.hi), qo).value;
}

}  // namespace rho
