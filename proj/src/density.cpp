#include "rho/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "rho/random.hpp"

namespace rho {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_params(const char* name, std::initializer_list<double> ps) {
  std::string s(name);
  char buf[40];
  for (double p : ps) {
    std::snprintf(buf, sizeof(buf), "|%.17g", p);
    s += buf;
  }
  return s;
}

double require_real(const Obs& o) {
  if (o.kind != Obs::Kind::Real)
    throw std::invalid_argument("density evaluated on an observation from another space");
  return o.x;
}

// log(1 + e^u) without overflow
double softplus(double u) { return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

}  // namespace

// -- CoordinateDensity defaults ---------------------------------------------

Obs CoordinateDensity::sample(RandomStream&) const {
  throw std::invalid_argument("density has no sampler: " + signature());
}

Interval CoordinateDensity::truncation(double) const {
  Interval s = support();
  if (std::isfinite(s.lo) && std::isfinite(s.hi)) return s;
  throw std::invalid_argument("density has unbounded support and no tail bound: " + signature());
}

DensityPtr CoordinateDensity::translated(double) const {
  throw std::invalid_argument("density is not translatable: " + signature());
}

DensityPtr CoordinateDensity::rescaled(double) const {
  throw std::invalid_argument("density is not rescalable: " + signature());
}

// -- Gaussian ----------------------------------------------------------------

GaussianDensity::GaussianDensity(double mean, double sigma) : mean_(mean), sigma_(sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("GaussianDensity: sigma must be positive");
}

double GaussianDensity::density(const Obs& o) const {
  const double z = (require_real(o) - mean_) / sigma_;
  return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * M_PI));
}

Interval GaussianDensity::truncation(double eps) const {
  const double t = std::sqrt(2.0 * std::log(0.5 / std::max(eps, 1e-300)));
  return {mean_ - sigma_ * t, mean_ + sigma_ * t};
}

std::optional<double> GaussianDensity::affinity_to(const CoordinateDensity& other) const {
  const auto* g = dynamic_cast<const GaussianDensity*>(&other);
  if (!g) return std::nullopt;
  const double v = sigma_ * sigma_ + g->sigma_ * g->sigma_;
  const double d = mean_ - g->mean_;
  return std::sqrt(2.0 * sigma_ * g->sigma_ / v) * std::exp(-d * d / (4.0 * v));
}

bool GaussianDensity::mixture_symmetric_with(const CoordinateDensity& other) const {
  const auto* g = dynamic_cast<const GaussianDensity*>(&other);
  return g && g->sigma_ == sigma_;
}

Obs GaussianDensity::sample(RandomStream& rng) const { return {mean_ + sigma_ * rng.normal()}; }

DensityPtr GaussianDensity::translated(double delta) const {
  return std::make_shared<GaussianDensity>(mean_ + delta, sigma_);
}

DensityPtr GaussianDensity::rescaled(double lambda) const {
  return std::make_shared<GaussianDensity>(mean_ * lambda, sigma_ * lambda);
}

std::string GaussianDensity::signature() const { return fmt_params("gauss", {mean_, sigma_}); }

// -- Laplace ------------------------------------------------------------------

LaplaceDensity::LaplaceDensity(double loc, double scale) : loc_(loc), scale_(scale) {
  if (!(scale > 0)) throw std::invalid_argument("LaplaceDensity: scale must be positive");
}

double LaplaceDensity::density(const Obs& o) const {
  return std::exp(-std::fabs(require_real(o) - loc_) / scale_) / (2.0 * scale_);
}

Interval LaplaceDensity::truncation(double eps) const {
  const double t = scale_ * std::log(0.5 / std::max(eps, 1e-300));
  return {loc_ - t, loc_ + t};
}

std::optional<double> LaplaceDensity::affinity_to(const CoordinateDensity& other) const {
  const auto* l = dynamic_cast<const LaplaceDensity*>(&other);
  if (!l || l->scale_ != scale_) return std::nullopt;
  const double d = std::fabs(loc_ - l->loc_) / (2.0 * scale_);
  return std::exp(-d) * (1.0 + d);
}

bool LaplaceDensity::mixture_symmetric_with(const CoordinateDensity& other) const {
  const auto* l = dynamic_cast<const LaplaceDensity*>(&other);
  return l && l->scale_ == scale_;
}

Obs LaplaceDensity::sample(RandomStream& rng) const { return {loc_ + scale_ * rng.laplace()}; }

DensityPtr LaplaceDensity::translated(double delta) const {
  return std::make_shared<LaplaceDensity>(loc_ + delta, scale_);
}

DensityPtr LaplaceDensity::rescaled(double lambda) const {
  return std::make_shared<LaplaceDensity>(loc_ * lambda, scale_ * lambda);
}

std::string LaplaceDensity::signature() const { return fmt_params("laplace", {loc_, scale_}); }

// -- Cauchy -------------------------------------------------------------------

CauchyDensity::CauchyDensity(double loc, double scale) : loc_(loc), scale_(scale) {
  if (!(scale > 0)) throw std::invalid_argument("CauchyDensity: scale must be positive");
}

double CauchyDensity::density(const Obs& o) const {
  const double z = (require_real(o) - loc_) / scale_;
  return 1.0 / (M_PI * scale_ * (1.0 + z * z));
}

Interval CauchyDensity::truncation(double eps) const {
  const double t = scale_ / (M_PI * std::max(eps, 1e-300));
  return {loc_ - t, loc_ + t};
}

bool CauchyDensity::mixture_symmetric_with(const CoordinateDensity& other) const {
  const auto* c = dynamic_cast<const CauchyDensity*>(&other);
  return c && c->scale_ == scale_;
}

Obs CauchyDensity::sample(RandomStream& rng) const { return {loc_ + scale_ * rng.cauchy()}; }

DensityPtr CauchyDensity::translated(double delta) const {
  return std::make_shared<CauchyDensity>(loc_ + delta, scale_);
}

DensityPtr CauchyDensity::rescaled(double lambda) const {
  return std::make_shared<CauchyDensity>(loc_ * lambda, scale_ * lambda);
}

std::string CauchyDensity::signature() const { return fmt_params("cauchy", {loc_, scale_}); }

// -- Uniform ------------------------------------------------------------------

UniformDensity::UniformDensity(double center, double halfwidth) : center_(center), hw_(halfwidth) {
  if (!(halfwidth > 0)) throw std::invalid_argument("UniformDensity: halfwidth must be positive");
}

double UniformDensity::density(const Obs& o) const {
  const double x = require_real(o);
  return (x >= center_ - hw_ && x <= center_ + hw_) ? 1.0 / (2.0 * hw_) : 0.0;
}

std::optional<double> UniformDensity::affinity_to(const CoordinateDensity& other) const {
  const auto* u = dynamic_cast<const UniformDensity*>(&other);
  if (!u || u->hw_ != hw_) return std::nullopt;
  return std::max(0.0, 1.0 - std::fabs(center_ - u->center_) / (2.0 * hw_));
}

std::optional<double> UniformDensity::mixture_affinity_to(const CoordinateDensity& other) const {
  const auto* u = dynamic_cast<const UniformDensity*>(&other);
  if (!u || u->hw_ != hw_) return std::nullopt;
  // overlap at density 1/(2hw), the symmetric difference at half of it
  const double overlap = std::max(0.0, 2.0 * hw_ - std::fabs(center_ - u->center_));
  const double alone = 2.0 * hw_ - overlap;
  return (overlap + alone / std::sqrt(2.0)) / (2.0 * hw_);
}

bool UniformDensity::mixture_symmetric_with(const CoordinateDensity& other) const {
  const auto* u = dynamic_cast<const UniformDensity*>(&other);
  return u && u->hw_ == hw_;
}

Obs UniformDensity::sample(RandomStream& rng) const {
  return {center_ + hw_ * (2.0 * rng.uniform01() - 1.0)};
}

DensityPtr UniformDensity::translated(double delta) const {
  return std::make_shared<UniformDensity>(center_ + delta, hw_);
}

DensityPtr UniformDensity::rescaled(double lambda) const {
  return std::make_shared<UniformDensity>(center_ * lambda, hw_ * lambda);
}

std::string UniformDensity::signature() const { return fmt_params("unif", {center_, hw_}); }

// -- PBeta --------------------------------------------------------------------

double PBetaDensity::normalization(double beta) {
  if (beta == 0.0) return 0.5;
  return 1.0 / (2.0 * std::tgamma(beta + 1.0));
}

PBetaDensity::PBetaDensity(double beta, double loc, double scale)
    : beta_(beta), loc_(loc), scale_(scale), lambda_norm_(normalization(beta)) {
  if (!(beta >= 0)) throw std::invalid_argument("PBetaDensity: beta must be >= 0");
  if (!(scale > 0)) throw std::invalid_argument("PBetaDensity: scale must be positive");
}

double PBetaDensity::density(const Obs& o) const {
  const double z = std::fabs(require_real(o) - loc_) / scale_;
  if (beta_ == 0.0) return z <= 1.0 ? 0.5 / scale_ : 0.0;
  return lambda_norm_ * std::exp(-std::pow(z, 1.0 / beta_)) / scale_;
}

Interval PBetaDensity::support() const {
  if (beta_ == 0.0) return {loc_ - scale_, loc_ + scale_};
  return {};
}

std::vector<double> PBetaDensity::breakpoints() const {
  if (beta_ == 0.0) return {loc_ - scale_, loc_ + scale_};
  return {loc_};
}

Interval PBetaDensity::truncation(double eps) const {
  if (beta_ == 0.0) return support();
  // tail above loc + s u0^beta is <= 2 Lb u0^(b-1) e^-u0 once u0 >= 2 beta + 2
  const double target = std::max(eps, 1e-300);
  const double c = std::log(std::max(2.0 * lambda_norm_ * scale_ * beta_, 1e-10) / target);
  double u0 = std::max(2.0 * beta_ + 2.0, c);
  for (int it = 0; it < 50; ++it)
    u0 = std::max(2.0 * beta_ + 2.0, c + (beta_ - 1.0) * std::log(std::max(u0, 1.0)));
  const double r = scale_ * std::pow(u0, beta_);
  return {loc_ - r, loc_ + r};
}

std::optional<double> PBetaDensity::affinity_to(const CoordinateDensity& other) const {
  const auto* p = dynamic_cast<const PBetaDensity*>(&other);
  if (!p || p->beta_ != beta_ || p->loc_ != loc_) return std::nullopt;
  const double lam = p->scale_ / scale_;
  if (lam == 1.0) return 1.0;
  if (beta_ == 0.0) return std::sqrt(std::min(lam, 1.0 / lam));
  // rho = 2^b / (sqrt(lam) (1 + lam^(-1/b))^b), stable in logs
  const double u = -std::log(lam) / beta_;
  const double log_rho = beta_ * std::log(2.0) - 0.5 * std::log(lam) - beta_ * softplus(u);
  return std::exp(log_rho);
}

bool PBetaDensity::mixture_symmetric_with(const CoordinateDensity& other) const {
  const auto* p = dynamic_cast<const PBetaDensity*>(&other);
  return p && p->beta_ == beta_ && p->scale_ == scale_;
}

Obs PBetaDensity::sample(RandomStream& rng) const {
  const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  if (beta_ == 0.0) return {loc_ + sign * scale_ * rng.uniform01()};
  return {loc_ + sign * scale_ * std::pow(rng.gamma(beta_), beta_)};
}

DensityPtr PBetaDensity::translated(double delta) const {
  return std::make_shared<PBetaDensity>(beta_, loc_ + delta, scale_);
}

DensityPtr PBetaDensity::rescaled(double lambda) const {
  return std::make_shared<PBetaDensity>(beta_, loc_ * lambda, scale_ * lambda);
}

std::string PBetaDensity::signature() const { return fmt_params("pbeta", {beta_, loc_, scale_}); }

// -- InvSqrt ------------------------------------------------------------------

InvSqrtDensity::InvSqrtDensity(double loc) : loc_(loc) {}

double InvSqrtDensity::density(const Obs& o) const {
  const double z = std::fabs(require_real(o) - loc_);
  if (z > 1.0) return 0.0;
  if (z == 0.0) return kInf;
  return 0.25 / std::sqrt(z);
}

bool InvSqrtDensity::mixture_symmetric_with(const CoordinateDensity& other) const {
  return dynamic_cast<const InvSqrtDensity*>(&other) != nullptr;
}

Obs InvSqrtDensity::sample(RandomStream& rng) const {
  const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  const double u = rng.uniform01();
  return {loc_ + sign * u * u};
}

DensityPtr InvSqrtDensity::translated(double delta) const {
  return std::make_shared<InvSqrtDensity>(loc_ + delta);
}

std::string InvSqrtDensity::signature() const { return fmt_params("invsqrt", {loc_}); }

// -- Histogram ----------------------------------------------------------------

HistogramDensity::HistogramDensity(std::vector<double> edges, Eigen::VectorXd masses)
    : edges_(std::move(edges)), masses_(std::move(masses)) {
  if (edges_.size() < 2 || static_cast<int>(edges_.size()) != masses_.size() + 1)
    throw std::invalid_argument("HistogramDensity: need k+1 edges for k cells");
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i)
    if (!(edges_[i] < edges_[i + 1]))
      throw std::invalid_argument("HistogramDensity: edges must be increasing");
  for (int i = 0; i < masses_.size(); ++i)
    if (masses_[i] < 0) throw std::invalid_argument("HistogramDensity: negative mass");
  const double total = masses_.sum();
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument("HistogramDensity: masses must sum to 1");
}

int HistogramDensity::cell_of(double x) const {
  if (x < edges_.front() || x > edges_.back()) return -1;
  if (x == edges_.back()) return cells() - 1;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  return static_cast<int>(it - edges_.begin()) - 1;
}

double HistogramDensity::density(const Obs& o) const {
  const int c = cell_of(require_real(o));
  if (c < 0) return 0.0;
  return masses_[c] / (edges_[c + 1] - edges_[c]);
}

namespace {

// walk the merged partition of two histograms, calling f(d1, d2, len)
template <typename F>
void merged_cells(const HistogramDensity& a, const HistogramDensity& b, F&& f) {
  std::vector<double> cuts;
  cuts.reserve(a.edges().size() + b.edges().size());
  cuts.insert(cuts.end(), a.edges().begin(), a.edges().end());
  cuts.insert(cuts.end(), b.edges().begin(), b.edges().end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double mid = 0.5 * (lo + hi);
    f(a.density(Obs(mid)), b.density(Obs(mid)), hi - lo);
  }
}

}  // namespace

std::optional<double> HistogramDensity::affinity_to(const CoordinateDensity& other) const {
  const auto* h = dynamic_cast<const HistogramDensity*>(&other);
  if (!h) return std::nullopt;
  double rho = 0.0;
  if (h->edges_ == edges_) {  // shared partition: the length factors cancel
    for (int c = 0; c < cells(); ++c) rho += std::sqrt(masses_[c] * h->masses_[c]);
    return rho;
  }
  merged_cells(*this, *h,
               [&](double d1, double d2, double len) { rho += std::sqrt(d1 * d2) * len; });
  return rho;
}

std::optional<double> HistogramDensity::mixture_affinity_to(const CoordinateDensity& other) const {
  const auto* h = dynamic_cast<const HistogramDensity*>(&other);
  if (!h) return std::nullopt;
  double rho = 0.0;
  if (h->edges_ == edges_) {
    for (int c = 0; c < cells(); ++c)
      rho += std::sqrt(masses_[c] * 0.5 * (masses_[c] + h->masses_[c]));
    return rho;
  }
  merged_cells(*this, *h, [&](double d1, double d2, double len) {
    rho += std::sqrt(d1 * 0.5 * (d1 + d2)) * len;
  });
  return rho;
}

Obs HistogramDensity::sample(RandomStream& rng) const {
  double u = rng.uniform01();
  for (int c = 0; c < cells(); ++c) {
    if (u <= masses_[c] || c == cells() - 1)
      return {edges_[c] + (edges_[c + 1] - edges_[c]) * rng.uniform01()};
    u -= masses_[c];
  }
  return {edges_.back()};
}

DensityPtr HistogramDensity::translated(double delta) const {
  std::vector<double> e = edges_;
  for (double& x : e) x += delta;
  return std::make_shared<HistogramDensity>(std::move(e), masses_);
}

DensityPtr HistogramDensity::rescaled(double lambda) const {
  if (!(lambda > 0)) throw std::invalid_argument("rescaled: lambda must be positive");
  std::vector<double> e = edges_;
  for (double& x : e) x *= lambda;
  return std::make_shared<HistogramDensity>(std::move(e), masses_);
}

std::string HistogramDensity::signature() const {
  std::string s = "hist";
  char buf[40];
  for (double e : edges_) {
    std::snprintf(buf, sizeof(buf), "|%.17g", e);
    s += buf;
  }
  s += ";";
  for (int i = 0; i < masses_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "|%.17g", masses_[i]);
    s += buf;
  }
  return s;
}

// -- TableDensity ---------------------------------------------------------------

TableDensity::TableDensity(std::vector<std::pair<double, double>> atoms)
    : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  double total = 0.0;
  for (const auto& [x, m] : atoms_) {
    if (m < 0) throw std::invalid_argument("TableDensity: negative mass");
    total += m;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument("TableDensity: masses must sum to 1");
}

double TableDensity::density(const Obs& o) const {
  const double x = require_real(o);
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), std::make_pair(x, -1.0));
  if (it != atoms_.end() && it->first == x) return it->second;
  return 0.0;
}

std::optional<double> TableDensity::affinity_to(const CoordinateDensity& other) const {
  const auto* t = dynamic_cast<const TableDensity*>(&other);
  if (!t) return std::nullopt;
  double rho = 0.0;
  for (const auto& [x, m] : atoms_) {
    const double mu = t->density(Obs(x));
    if (mu > 0.0) rho += std::sqrt(m * mu);
  }
  return rho;
}

std::optional<double> TableDensity::mixture_affinity_to(const CoordinateDensity& other) const {
  const auto* t = dynamic_cast<const TableDensity*>(&other);
  if (!t) return std::nullopt;
  double rho = 0.0;
  for (const auto& [x, m] : atoms_) rho += std::sqrt(m * 0.5 * (m + t->density(Obs(x))));
  return rho;
}

Obs TableDensity::sample(RandomStream& rng) const {
  double u = rng.uniform01();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (u <= atoms_[i].second || i + 1 == atoms_.size()) return {atoms_[i].first};
    u -= atoms_[i].second;
  }
  return {atoms_.back().first};
}

std::string TableDensity::signature() const {
  std::string s = "table";
  char buf[80];
  for (const auto& [x, m] : atoms_) {
    std::snprintf(buf, sizeof(buf), "|%.17g:%.17g", x, m);
    s += buf;
  }
  return s;
}

// -- SequenceDensity -------------------------------------------------------------

SequenceDensity::SequenceDensity(std::vector<int> theta_stem, int alphabet_size, int depth_cap)
    : stem_(std::move(theta_stem)), alphabet_(alphabet_size), depth_cap_(depth_cap) {
  if (alphabet_ < 2) throw std::invalid_argument("SequenceDensity: alphabet size must be >= 2");
  if (depth_cap_ < 1) throw std::invalid_argument("SequenceDensity: depth cap must be >= 1");
  for (int s : stem_)
    if (s < 0 || s >= alphabet_) throw std::invalid_argument("SequenceDensity: symbol out of range");
}

int SequenceDensity::symbol_at(int k) const {
  return k < static_cast<int>(stem_.size()) ? stem_[k] : 0;
}

int SequenceDensity::common_prefix(const SequenceDensity& other) const {
  const int m = std::max(stem_.size(), other.stem_.size());
  for (int k = 0; k < m; ++k)
    if (symbol_at(k) != other.symbol_at(k)) return k;
  return std::numeric_limits<int>::max();  // identical sequences
}

double SequenceDensity::density(const Obs& o) const {
  if (o.kind != Obs::Kind::Seq)
    throw std::invalid_argument("sequence density evaluated on a non-sequence observation");
  const int len = static_cast<int>(o.seq.size());
  if (len < 1) return 0.0;
  for (int k = 0; k < len; ++k)
    if (o.seq[k] != symbol_at(k)) return 0.0;
  return std::ldexp(1.0, -len);  // 2^-len
}

std::optional<double> SequenceDensity::affinity_to(const CoordinateDensity& other) const {
  const auto* s = dynamic_cast<const SequenceDensity*>(&other);
  if (!s) return std::nullopt;
  const int j = common_prefix(*s);
  if (j == std::numeric_limits<int>::max()) return 1.0;
  return 1.0 - std::ldexp(1.0, -j);
}

std::optional<double> SequenceDensity::mixture_affinity_to(const CoordinateDensity& other) const {
  const auto* s = dynamic_cast<const SequenceDensity*>(&other);
  if (!s) return std::nullopt;
  const int j = common_prefix(*s);
  if (j == std::numeric_limits<int>::max()) return 1.0;
  return 1.0 - (1.0 - 1.0 / std::sqrt(2.0)) * std::ldexp(1.0, -j);
}

bool SequenceDensity::mixture_symmetric_with(const CoordinateDensity& other) const {
  return dynamic_cast<const SequenceDensity*>(&other) != nullptr;
}

Obs SequenceDensity::sample(RandomStream& rng) const {
  const double u = rng.uniform01();
  const int depth = static_cast<int>(std::ceil(-std::log2(u)));
  if (depth > depth_cap_)
    throw std::runtime_error("SequenceDensity: sampled depth exceeds the depth cap");
  std::vector<int> prefix(depth);
  for (int k = 0; k < depth; ++k) prefix[k] = symbol_at(k);
  return Obs::sequence(std::move(prefix));
}

std::string SequenceDensity::signature() const {
  std::string s = "seq";
  for (int k : stem_) s += "|" + std::to_string(k);
  return s;
}

// -- RegressionDensity ------------------------------------------------------------

RegressionDensity::RegressionDensity(DensityPtr error_density, std::function<double(double)> g,
                                     std::string g_signature,
                                     std::function<double(RandomStream&)> w_sampler)
    : err_(std::move(error_density)),
      g_(std::move(g)),
      g_sig_(std::move(g_signature)),
      w_sampler_(std::move(w_sampler)) {
  if (!err_) throw std::invalid_argument("RegressionDensity: null error density");
}

double RegressionDensity::density(const Obs& o) const {
  if (o.kind != Obs::Kind::WY)
    throw std::invalid_argument("regression density evaluated on a non-(w,y) observation");
  return err_->density(Obs(o.x - g_(o.w)));
}

bool RegressionDensity::mixture_symmetric_with(const CoordinateDensity& other) const {
  const auto* r = dynamic_cast<const RegressionDensity*>(&other);
  return r && err_->symmetric() && r->err_->signature() == err_->signature();
}

bool RegressionDensity::can_sample() const {
  return static_cast<bool>(w_sampler_) && err_->can_sample();
}

Obs RegressionDensity::sample(RandomStream& rng) const {
  if (!can_sample()) throw std::invalid_argument("RegressionDensity: no design sampler attached");
  const double w = w_sampler_(rng);
  const double eps = err_->sample(rng).x;
  return Obs::wy(w, g_(w) + eps);
}

std::string RegressionDensity::signature() const {
  return "reg[" + err_->signature() + ";" + g_sig_ + "]";
}

// -- ProductDensity ---------------------------------------------------------------

ProductDensity::ProductDensity(std::vector<DensityPtr> coords)
    : coords_(std::move(coords)), n_(static_cast<int>(coords_.size())), iid_(false) {
  if (coords_.empty()) throw std::invalid_argument("ProductDensity: empty coordinate list");
  for (const auto& c : coords_)
    if (!c) throw std::invalid_argument("ProductDensity: null coordinate");
}

ProductDensity ProductDensity::iid(DensityPtr d, int n) {
  if (!d) throw std::invalid_argument("ProductDensity: null coordinate");
  if (n < 1) throw std::invalid_argument("ProductDensity: n must be >= 1");
  ProductDensity p;
  p.coords_ = {std::move(d)};
  p.n_ = n;
  p.iid_ = true;
  return p;
}

std::string ProductDensity::signature() const {
  if (iid_) return "iid^" + std::to_string(n_) + "[" + coords_[0]->signature() + "]";
  std::string s = "prod[";
  for (const auto& c : coords_) s += c->signature() + ";";
  s += "]";
  return s;
}

// -- Sample ------------------------------------------------------------------------

Sample Sample::reals(const Eigen::VectorXd& xs) {
  std::vector<Obs> o;
  o.reserve(xs.size());
  for (int i = 0; i < xs.size(); ++i) o.emplace_back(xs[i]);
  return Sample(std::move(o));
}

Eigen::VectorXd Sample::reals() const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) {
    if (obs_[i].kind != Obs::Kind::Real)
      throw std::invalid_argument("Sample: non-real observation");
    v[i] = obs_[i].x;
  }
  return v;
}

}  // namespace rho
