#include "rho/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "rho/constants.hpp"
#include "rho/models.hpp"

namespace rho {

double vc_dimension_proxy(int v_bar, int n, double C) {
  if (v_bar < 1) throw std::invalid_argument("vc_dimension_proxy: v_bar must be >= 1");
  if (!(C > 0)) throw std::invalid_argument("vc_dimension_proxy: C must be positive");
  const double ratio = static_cast<double>(n) / v_bar;
  return C * v_bar * (1.0 + std::max(std::log(ratio), 0.0));
}

void finalize_family(PenalizedFamily& family) {
  if (family.models.empty()) throw std::invalid_argument("finalize_family: no models");
  if (family.models.size() != family.delta.size())
    throw std::invalid_argument("finalize_family: one Delta per model required");

  double mass = 0.0;
  for (std::size_t m = 0; m < family.models.size(); ++m) {
    family.models[m].check();
    if (!(family.delta[m] >= 0))
      throw std::invalid_argument("finalize_family: Delta must be non-negative");
    if (!family.models[m].dimension_proxy)
      throw std::invalid_argument("finalize_family: model '" + family.models[m].label +
                                  "' has no dimension proxy");
    mass += std::exp(-family.delta[m]);
  }
  family.delta_mass = mass;
  if (mass > 1.0 + 1e-12)
    throw std::invalid_argument("finalize_family: sum exp(-Delta) exceeds 1");

  family.union_net = ModelNet{};
  family.union_net.label = "union";
  family.owners.clear();
  std::unordered_map<std::string, int> seen;
  for (std::size_t m = 0; m < family.models.size(); ++m) {
    const ModelNet& net = family.models[m];
    for (int j = 0; j < net.size(); ++j) {
      const std::string sig = net.points[j].signature();
      auto it = seen.find(sig);
      if (it == seen.end()) {
        const int idx = family.union_net.size();
        seen.emplace(sig, idx);
        family.union_net.points.push_back(net.points[j]);
        family.union_net.params.push_back(j < static_cast<int>(net.params.size())
                                              ? net.params[j]
                                              : Eigen::VectorXd());
        family.owners.push_back({static_cast<int>(m)});
      } else {
        family.owners[it->second].push_back(static_cast<int>(m));
      }
    }
  }

  const double kappa = Constants::get().kappa;
  family.pen.assign(family.union_net.size(), 0.0);
  for (int u = 0; u < family.union_net.size(); ++u) {
    double best = std::numeric_limits<double>::infinity();
    for (int m : family.owners[u])
      best = std::min(best, 0.125 * *family.models[m].dimension_proxy + kappa * family.delta[m]);
    family.pen[u] = best;
  }
}

std::vector<double> pen1(const PenalizedFamily& family) {
  if (family.union_net.size() == 0)
    throw std::invalid_argument("pen1: family not finalized");
  for (int u = 0; u < family.union_net.size(); ++u)
    if (family.owners[u].empty())
      throw std::invalid_argument("pen1: union point without a containing model");
  return family.pen;
}

PenalizedFamily make_scale_family(const std::vector<std::pair<DensityPtr, double>>& q_list,
                                  const std::vector<LocationClass>& f_list, int j_min, int j_max,
                                  int i_max, int n, double dimension_constant, long max_points) {
  if (q_list.empty() || f_list.empty())
    throw std::invalid_argument("make_scale_family: empty q or F list");
  double gamma_total = 0.0;
  for (const auto& [q, g] : q_list) {
    if (!q || !(g > 0)) throw std::invalid_argument("make_scale_family: invalid q entry");
    gamma_total += g;
  }
  double pi_total = 0.0;
  for (const auto& f : f_list) {
    if (f.gs.empty() || !(f.pi > 0))
      throw std::invalid_argument("make_scale_family: invalid location class");
    pi_total += f.pi;
  }
  if (gamma_total > 1.0 + 1e-12 || pi_total > 1.0 + 1e-12)
    throw std::invalid_argument("make_scale_family: gamma and pi must be sub-probabilities");

  PenalizedFamily fam;
  fam.dimension_constant = dimension_constant;
  const double log2 = std::log(2.0);
  for (const auto& [q, gamma_q] : q_list) {
    for (const auto& f : f_list) {
      for (int j = j_min; j <= j_max; ++j) {
        for (int i = 0; i <= i_max; ++i) {
          for (int k = 0; k < (1 << i); ++k) {
            const double lambda = std::ldexp(1.0 + std::ldexp(static_cast<double>(k), -i), j);
            ModelNet net;
            net.label = q->signature() + "/" + f.label + "/l=" + std::to_string(lambda);
            const DensityPtr q_scaled = q->rescaled(lambda);
            for (const Eigen::VectorXd& g : f.gs) {
              if (g.size() != n)
                throw std::invalid_argument("make_scale_family: location vector length != n");
              std::vector<DensityPtr> coords;
              coords.reserve(n);
              for (int c = 0; c < n; ++c) coords.push_back(q_scaled->translated(g[c]));
              net.points.emplace_back(std::move(coords));
              net.params.push_back(g);
              if (static_cast<long>(net.points.size()) > max_points)
                throw std::invalid_argument("make_scale_family: net exceeds the size cap");
            }
            net.dimension_proxy = vc_dimension_proxy(f.v_bar, n, dimension_constant);
            fam.models.push_back(std::move(net));
            fam.delta.push_back(-std::log(gamma_q) - std::log(f.pi) + std::abs(j) + i + 2.0 +
                                i * log2);
          }
        }
      }
    }
  }

  // untruncated sum over j in Z, i in N of e^-(|j| + i + 2); the k-sum is 1
  const double e1 = std::exp(-1.0);
  const double full = gamma_total * pi_total * std::exp(-2.0) * (1.0 + 2.0 * e1 / (1.0 - e1)) *
                      (1.0 / (1.0 - e1));
  finalize_family(fam);
  fam.dropped_delta_mass = std::max(0.0, full - fam.delta_mass);
  return fam;
}

PenalizedFamily make_sparse_index_family(
    const std::vector<std::function<double(double)>>& transforms,
    const std::vector<std::function<double(double)>>& basis, const Eigen::VectorXd& coeff_grid,
    int n, int sparsity_cap, const DensityPtr& q, double dimension_constant,
    const std::function<double(RandomStream&)>& w_sampler, long max_points) {
  const int K = static_cast<int>(transforms.size());
  const int M = static_cast<int>(basis.size());
  if (K < 1 || M < 1) throw std::invalid_argument("make_sparse_index_family: K, M must be >= 1");
  if (sparsity_cap < 1 || sparsity_cap > M)
    throw std::invalid_argument("make_sparse_index_family: sparsity cap exceeded");

  PenalizedFamily fam;
  fam.dimension_constant = dimension_constant;
  // enumerate non-void supports m with |m| <= cap, by size then lexicographic
  std::vector<int> support;
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    if (!support.empty()) {
      const int l = static_cast<int>(support.size());
      for (int k = 0; k < K; ++k) {
        std::vector<std::function<double(double)>> sub;
        sub.reserve(l);
        std::string label = "F[k=" + std::to_string(k) + ";m=";
        for (int idx : support) {
          sub.push_back(basis[idx]);
          label += std::to_string(idx) + ",";
        }
        label += "]";
        std::vector<Eigen::VectorXd> grids(l, coeff_grid);
        ModelNet net =
            make_random_design_net(q, sub, grids, n, transforms[k], w_sampler, max_points);
        net.label = label;
        net.dimension_proxy = vc_dimension_proxy(l + 2, n, dimension_constant);
        fam.models.push_back(std::move(net));
        fam.delta.push_back(std::log(static_cast<double>(K)) + std::log(static_cast<double>(M)) +
                            l * (1.0 + std::log(static_cast<double>(M)) -
                                 std::log(static_cast<double>(l))));
      }
    }
    if (remaining == 0) return;
    for (int next = start; next < M; ++next) {
      support.push_back(next);
      rec(next + 1, remaining - 1);
      support.pop_back();
    }
  };
  rec(0, sparsity_cap);
  finalize_family(fam);
  return fam;
}

SelectResult rho_select(const Sample& X, const PenalizedFamily& family,
                        const CriterionOptions& opt) {
  if (family.union_net.size() == 0)
    throw std::invalid_argument("rho_select: family not finalized");
  SelectResult res;
  res.upsilon_bar = penalized_upsilon_all(X, family.union_net, family.pen, opt);

  int arg = 0;
  for (int u = 1; u < res.upsilon_bar.size(); ++u)
    if (res.upsilon_bar[u] < res.upsilon_bar[arg]) arg = u;
  const double cutoff = res.upsilon_bar[arg] + Constants::criterion_slack();
  for (int u = 0; u < res.upsilon_bar.size(); ++u)
    if (res.upsilon_bar[u] <= cutoff) res.slack_set.push_back(u);

  res.union_index = arg;
  res.model_index = family.owners[arg].front();
  res.model_label = family.models[res.model_index].label;
  res.point = family.union_net.points[arg];
  return res;
}

}  // namespace rho
