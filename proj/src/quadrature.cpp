#include "rho/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace rho {

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1,1].
constexpr int kNodes = 8;  // nonnegative abscissae
constexpr double kAbscissa[kNodes] = {
    0.000000000000000000, 0.207784955007898468, 0.405845151377397167, 0.586087235467691130,
    0.741531185599394440, 0.864864423359769073, 0.949107912342758525, 0.991455371120812639};
constexpr double kWeightK[kNodes] = {
    0.209482141084727828, 0.204432940075298892, 0.190350578064785410, 0.169004726639267903,
    0.140653259715525919, 0.104790010322250184, 0.063092092629978553, 0.022935322010529225};
constexpr double kWeightG[4] = {
    0.417959183673469388, 0.381830050505118945, 0.279705391489276668, 0.129484966168869693};

struct Piece {
  double a, b;
};

void gk15(const std::function<double(double)>& f, double a, double b, double& value,
          double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = kWeightK[0] * f0;
  double g = kWeightG[0] * f0;
  for (int i = 1; i < kNodes; ++i) {
    const double dx = h * kAbscissa[i];
    const double fi = f(c - dx) + f(c + dx);
    k += kWeightK[i] * fi;
    if (i % 2 == 0) g += kWeightG[i / 2] * fi;
  }
  value = k * h;
  const double diff = (k - g) * h;
  // standard QUADPACK-style error heuristic
  err = std::fabs(diff);
  if (err > 0.0) err = std::min(err, 200.0 * err * std::sqrt(err));
}

}  // namespace

QuadResult integrate_with_breakpoints(const std::function<double(double)>& f, double a, double b,
                                      const std::vector<double>& breakpoints,
                                      const QuadOptions& opt) {
  QuadResult out;
  if (!(a < b)) return out;

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Piece> stack;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) stack.push_back({cuts[i], cuts[i + 1]});
  const double per_piece_tol = opt.abs_tol / static_cast<double>(stack.size());

  // each piece gets an equal share of the tolerance; halves split their share
  struct Work {
    Piece p;
    double tol;
  };
  std::vector<Work> todo;
  todo.reserve(64);
  for (const Piece& p : stack) todo.push_back({p, per_piece_tol});

  bool budget_exhausted = false;
  while (!todo.empty()) {
    Work w = todo.back();
    todo.pop_back();
    double v, e;
    gk15(f, w.p.a, w.p.b, v, e);
    ++out.intervals;
    const bool tiny = (w.p.b - w.p.a) <= 1e-14 * (std::fabs(w.p.a) + std::fabs(w.p.b) + 1.0);
    if (e <= w.tol || tiny) {
      out.value += v;
      out.error += e;
      continue;
    }
    if (out.intervals >= opt.max_intervals) {
      budget_exhausted = true;
      out.value += v;
      out.error += e;
      continue;
    }
    const double mid = 0.5 * (w.p.a + w.p.b);
    todo.push_back({{w.p.a, mid}, 0.5 * w.tol});
    todo.push_back({{mid, w.p.b}, 0.5 * w.tol});
  }

  if (budget_exhausted && out.error > opt.abs_tol && opt.throw_on_failure)
    throw NumericalError("quadrature did not converge within interval budget (error estimate " +
                             std::to_string(out.error) + ")",
                         out.value, out.error);
  return out;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt) {
  return integrate_with_breakpoints(f, a, b, {}, opt);
}

}  // namespace rho
