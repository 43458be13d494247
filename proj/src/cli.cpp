#include "rho/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rho/affinity.hpp"
#include "rho/criterion.hpp"
#include "rho/models.hpp"
#include "rho/quadrature.hpp"
#include "rho/selection.hpp"
#include "rho/simulate.hpp"

namespace rho::cli {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_req(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": key '" + key + "' has the wrong type");
  }
}

DensityPtr error_from_config(const json& m, const std::string& where) {
  const std::string base = get_or<std::string>(m, "base", get_or<std::string>(m, "error", "gauss"));
  const double sigma = get_or<double>(m, "sigma", 1.0);
  if (base == "gauss") return std::make_shared<GaussianDensity>(0.0, sigma);
  if (base == "uniform") return std::make_shared<UniformDensity>(0.0, sigma);
  if (base == "cauchy") return std::make_shared<CauchyDensity>(0.0, sigma);
  if (base == "laplace") return std::make_shared<LaplaceDensity>(0.0, sigma);
  if (base == "pbeta")
    return std::make_shared<PBetaDensity>(get_or<double>(m, "beta", 1.0), 0.0, sigma);
  if (base == "invsqrt") return std::make_shared<InvSqrtDensity>(0.0);
  throw ConfigError(where + ": unknown base density '" + base + "'");
}

Sample load_data(const json& cfg, int n, const std::string& family, const json& model) {
  if (!cfg.contains("data")) throw ConfigError("config: missing 'data'");
  const json& d = cfg.at("data");
  require_keys(d, "data", {"inline", "csv", "generate"});

  if (d.contains("inline")) {
    const json& arr = d.at("inline");
    if (!arr.is_array()) throw ConfigError("data.inline: expected an array");
    std::vector<Obs> obs;
    for (const auto& v : arr) {
      if (v.is_number())
        obs.emplace_back(v.get<double>());
      else if (v.is_array() && v.size() == 2 && family != "sequence")
        obs.push_back(Obs::wy(v[0].get<double>(), v[1].get<double>()));
      else if (v.is_array())
        obs.push_back(Obs::sequence(v.get<std::vector<int>>()));
      else
        throw ConfigError("data.inline: unsupported observation");
    }
    return Sample(std::move(obs));
  }

  if (d.contains("csv")) {
    const std::string path = d.at("csv").get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("data.csv: cannot open " + path);
    std::vector<Obs> obs;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        obs.emplace_back(std::stod(line));
      else
        obs.push_back(Obs::wy(std::stod(line.substr(0, comma)),
                              std::stod(line.substr(comma + 1))));
    }
    return Sample(std::move(obs));
  }

  const json& g = d.at("generate");
  require_keys(g, "data.generate",
               {"family", "error", "base", "sigma", "beta", "theta", "n", "seed", "edges",
                "masses", "alphabet", "depth_cap"});
  const std::string family_g = get_or<std::string>(g, "family", family);
  const int count = get_or<int>(g, "n", n);
  RandomStream rng(get_or<std::uint64_t>(g, "seed", 1), 0);
  std::vector<Obs> obs(count);
  if (family_g == "sequence") {
    const DensityPtr truth =
        make_sequence_truth(get_req<std::vector<int>>(g, "theta", "data.generate"),
                            get_or<int>(g, "alphabet", get_or<int>(model, "alphabet", 2)),
                            get_or<int>(g, "depth_cap", get_or<int>(model, "depth_cap", 60)));
    for (auto& o : obs) o = truth->sample(rng);
  } else if (family_g == "histogram") {
    const auto edges = get_req<std::vector<double>>(g, "edges", "data.generate");
    const auto masses = get_req<std::vector<double>>(g, "masses", "data.generate");
    const HistogramDensity truth(
        edges, Eigen::Map<const Eigen::VectorXd>(masses.data(), static_cast<long>(masses.size())));
    for (auto& o : obs) o = truth.sample(rng);
  } else {
    const DensityPtr err = error_from_config(g, "data.generate");
    const DensityPtr truth = err->translated(get_or<double>(g, "theta", 0.0));
    for (auto& o : obs) o = truth->sample(rng);
  }
  return Sample(std::move(obs));
}

struct BuiltModel {
  ModelNet net;
  bool net_from_data = false;  // sequence nets depend on the sample
  json model_cfg;
};

BuiltModel build_model(const json& cfg, const Sample* X) {
  if (!cfg.contains("model")) throw ConfigError("config: missing 'model'");
  const json& m = cfg.at("model");
  const std::string type = get_req<std::string>(m, "type", "model");
  BuiltModel out;
  out.model_cfg = m;

  if (type == "translation") {
    require_keys(m, "model",
                 {"type", "base", "error", "sigma", "beta", "theta_min", "theta_max", "step", "n"});
    out.net = make_translation_net(error_from_config(m, "model"),
                                   get_req<double>(m, "theta_min", "model"),
                                   get_req<double>(m, "theta_max", "model"),
                                   get_req<double>(m, "step", "model"), get_req<int>(m, "n", "model"));
  } else if (type == "histogram") {
    require_keys(m, "model", {"type", "edges", "resolution", "n", "max_points"});
    out.net = make_histogram_net(get_req<std::vector<double>>(m, "edges", "model"),
                                 get_req<int>(m, "resolution", "model"),
                                 get_req<int>(m, "n", "model"),
                                 get_or<long>(m, "max_points", 200000));
  } else if (type == "sequence") {
    require_keys(m, "model", {"type", "alphabet", "depth_cap", "n"});
    if (!X) throw ConfigError("model: sequence nets require data first");
    out.net = make_sequence_net(*X, get_or<int>(m, "alphabet", 2), get_or<int>(m, "depth_cap", 60),
                                get_req<int>(m, "n", "model"));
    out.net_from_data = true;
  } else if (type == "random_design") {
    require_keys(m, "model", {"type", "base", "error", "sigma", "beta", "n", "grids", "transform"});
    const int n = get_req<int>(m, "n", "model");
    const auto grids_json = get_req<std::vector<std::vector<double>>>(m, "grids", "model");
    std::vector<std::function<double(double)>> basis;
    std::vector<Eigen::VectorXd> grids;
    for (std::size_t j = 0; j < grids_json.size(); ++j) {
      const int deg = static_cast<int>(j);
      basis.push_back([deg](double w) { return std::pow(w, deg); });
      grids.push_back(Eigen::Map<const Eigen::VectorXd>(grids_json[j].data(),
                                                        static_cast<long>(grids_json[j].size())));
    }
    std::function<double(double)> tr;
    const std::string trname = get_or<std::string>(m, "transform", "identity");
    if (trname == "exp")
      tr = [](double v) { return std::exp(v); };
    else if (trname == "abs")
      tr = [](double v) { return std::fabs(v); };
    else if (trname != "identity")
      throw ConfigError("model: unknown transform '" + trname + "'");
    out.net = make_random_design_net(error_from_config(m, "model"), basis, grids, n, tr);
  } else if (type == "fixed_design") {
    require_keys(m, "model",
                 {"type", "base", "error", "sigma", "beta", "n", "a_min", "a_max", "a_step",
                  "b_min", "b_max", "b_step"});
    const int n = get_req<int>(m, "n", "model");
    Eigen::MatrixXd basis(n, 2);
    basis.col(0).setOnes();
    basis.col(1) = affine_design(n);
    auto grid = [&](const char* lo, const char* hi, const char* st) {
      const double a = get_req<double>(m, lo, "model");
      const double b = get_req<double>(m, hi, "model");
      const double s = get_req<double>(m, st, "model");
      const int count = static_cast<int>(std::floor((b - a) / s + 1e-9)) + 1;
      Eigen::VectorXd g(count);
      for (int k = 0; k < count; ++k) g[k] = a + k * s;
      return g;
    };
    out.net = make_fixed_design_net(error_from_config(m, "model"), basis,
                                    {grid("a_min", "a_max", "a_step"),
                                     grid("b_min", "b_max", "b_step")});
  } else {
    throw ConfigError("model: unknown type '" + type + "'");
  }
  return out;
}

PenalizedFamily build_family(const json& cfg) {
  if (!cfg.contains("family")) throw ConfigError("config: missing 'family'");
  const json& f = cfg.at("family");
  const std::string type = get_req<std::string>(f, "type", "family");

  if (type == "histogram_family") {
    require_keys(f, "family", {"type", "models", "delta", "n", "dimension_constant"});
    const json& models = f.at("models");
    PenalizedFamily fam;
    fam.dimension_constant = get_or<double>(f, "dimension_constant", 1.0);
    const int n = get_req<int>(f, "n", "family");
    for (const auto& m : models) {
      require_keys(m, "family.models[]", {"edges", "resolution", "max_points"});
      fam.models.push_back(make_histogram_net(get_req<std::vector<double>>(m, "edges", "family"),
                                              get_req<int>(m, "resolution", "family"), n,
                                              get_or<long>(m, "max_points", 200000)));
    }
    fam.delta = get_req<std::vector<double>>(f, "delta", "family");
    finalize_family(fam);
    return fam;
  }

  if (type == "scale_family") {
    require_keys(f, "family",
                 {"type", "errors", "thetas", "pi", "v_bar", "j_min", "j_max", "i_max", "n",
                  "dimension_constant"});
    const int n = get_req<int>(f, "n", "family");
    std::vector<std::pair<DensityPtr, double>> qs;
    for (const auto& e : f.at("errors")) {
      require_keys(e, "family.errors[]", {"base", "sigma", "beta", "gamma"});
      qs.emplace_back(error_from_config(e, "family.errors"), get_req<double>(e, "gamma", "family"));
    }
    LocationClass loc;
    loc.label = "thetas";
    loc.v_bar = get_or<int>(f, "v_bar", 3);
    loc.pi = get_or<double>(f, "pi", 1.0);
    for (double th : get_req<std::vector<double>>(f, "thetas", "family"))
      loc.gs.push_back(Eigen::VectorXd::Constant(n, th));
    return make_scale_family(qs, {loc}, get_or<int>(f, "j_min", -8), get_or<int>(f, "j_max", 8),
                             get_or<int>(f, "i_max", 6), n,
                             get_or<double>(f, "dimension_constant", 1.0));
  }

  throw ConfigError("family: unknown type '" + type + "'");
}

json params_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

json scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const json& j, const std::string& where);

double config_tol(const json& cfg) {
  if (!cfg.contains("tolerances")) return 1e-9;
  return get_or<double>(cfg.at("tolerances"), "affinity_tol", 1e-9);
}

int cmd_estimate(const json& cfg, const Options& opts, json* report_out) {
  const auto t0 = std::chrono::steady_clock::now();
  const json& model = cfg.at("model");
  const std::string type = get_req<std::string>(model, "type", "model");
  Sample X = load_data(cfg, get_or<int>(model, "n", 0), type, model);
  BuiltModel built = build_model(cfg, &X);

  CriterionOptions copt;
  copt.tol = config_tol(cfg);
  copt.threads = opts.threads;
  const EstimateResult res = rho_estimate(X, built.net, copt);
  const auto t1 = std::chrono::steady_clock::now();

  json report;
  report["config"] = cfg;
  report["command"] = "estimate";
  report["net_size"] = built.net.size();
  report["n"] = X.size();
  report["estimate"]["index"] = res.index;
  report["estimate"]["params"] = params_to_json(built.net.params.empty()
                                                    ? Eigen::VectorXd()
                                                    : built.net.params[res.index]);
  report["estimate"]["signature"] = res.point.signature();
  report["upsilon_min"] = res.table.upsilon[res.index];
  report["slack_set_size"] = res.table.slack_set.size();
  report["runtime_sec"] = std::chrono::duration<double>(t1 - t0).count();
  write_file(std::filesystem::path(opts.out_dir) / "estimate.json", report.dump(2) + "\n");
  if (report_out) *report_out = report;
  if (opts.verbose) std::cerr << "estimate: index " << res.index << "\n";
  return kExitOk;
}

int cmd_select(const json& cfg, const Options& opts, json* report_out) {
  const auto t0 = std::chrono::steady_clock::now();
  PenalizedFamily fam = build_family(cfg);
  Sample X = load_data(cfg, fam.union_net.dimension(), "select", cfg.at("family"));

  CriterionOptions copt;
  copt.tol = config_tol(cfg);
  copt.threads = opts.threads;
  const SelectResult res = rho_select(X, fam, copt);
  const auto t1 = std::chrono::steady_clock::now();

  json report;
  report["config"] = cfg;
  report["command"] = "select";
  report["union_net_size"] = fam.union_net.size();
  report["selected"]["model_label"] = res.model_label;
  report["selected"]["model_index"] = res.model_index;
  report["selected"]["union_index"] = res.union_index;
  report["selected"]["params"] = params_to_json(fam.union_net.params[res.union_index]);
  report["upsilon_bar_min"] = res.upsilon_bar[res.union_index];
  report["slack_set_size"] = res.slack_set.size();
  report["delta_mass"] = fam.delta_mass;
  report["dropped_delta_mass"] = fam.dropped_delta_mass;
  report["runtime_sec"] = std::chrono::duration<double>(t1 - t0).count();
  write_file(std::filesystem::path(opts.out_dir) / "select.json", report.dump(2) + "\n");
  if (report_out) *report_out = report;
  return kExitOk;
}

int cmd_simulate(const json& cfg, const Options& opts, json* report_out) {
  if (!cfg.contains("scenario")) throw ConfigError("config: missing 'scenario'");
  Scenario sc;
  if (cfg.at("scenario").is_string())
    sc = bundled_scenario(cfg.at("scenario").get<std::string>());
  else
    sc = scenario_from_json(cfg.at("scenario"), "scenario");
  if (opts.seed) sc.seed = *opts.seed;
  if (opts.threads > 0) sc.threads = opts.threads;

  const RiskReport rr = run_scenario(sc);

  json report;
  report["config"] = cfg;
  report["command"] = "simulate";
  report["scenario"] = scenario_to_json(sc);
  json rows = json::array();
  for (const RiskRow& r : rr.rows) {
    json row;
    row["scenario"] = r.scenario;
    row["estimator"] = r.estimator;
    row["n"] = r.n;
    row["replications"] = r.replications;
    row["loss_name"] = r.loss;
    row["mean"] = r.mean;
    row["std_err"] = r.std_err;
    row["q05"] = r.q05;
    row["q50"] = r.q50;
    row["q95"] = r.q95;
    rows.push_back(row);
  }
  report["rows"] = rows;
  json slopes = json::array();
  for (const SlopeFit& s : rr.slopes) {
    json sj;
    sj["estimator"] = s.estimator;
    sj["loss"] = s.loss;
    sj["slope"] = s.slope;
    sj["slope_se"] = s.slope_se;
    slopes.push_back(sj);
  }
  report["slopes"] = slopes;

  const auto dir = std::filesystem::path(opts.out_dir);
  write_file(dir / "risk_report.csv", rr.to_csv());
  write_file(dir / "risk_report.json", report.dump(2) + "\n");
  if (report_out) *report_out = report;
  return kExitOk;
}

int cmd_verify(const json& cfg, const Options& opts, json* report_out) {
  const json v = cfg.contains("verify") ? cfg.at("verify") : json::object();
  require_keys(v, "verify", {"budget", "seed"});
  const std::uint64_t seed = opts.seed ? *opts.seed : get_or<std::uint64_t>(v, "seed", 20240801);
  const int budget = get_or<int>(v, "budget", 10000);

  const InequalityReport ir = verify_inequalities(seed, budget, opts.threads);

  json report;
  report["config"] = cfg;
  report["command"] = "verify";
  json checks = json::array();
  for (const InequalityCheck& c : ir.checks) {
    json cj;
    cj["name"] = c.name;
    cj["worst_margin"] = c.worst_margin;
    cj["pass"] = c.pass;
    cj["detail"] = c.detail;
    checks.push_back(cj);
    if (opts.verbose)
      std::cerr << (c.pass ? "pass " : "FAIL ") << c.name << "  margin " << c.worst_margin
                << "  (" << c.detail << ")\n";
  }
  report["checks"] = checks;
  report["all_pass"] = ir.all_pass();
  write_file(std::filesystem::path(opts.out_dir) / "verify.json", report.dump(2) + "\n");
  if (report_out) *report_out = report;
  return ir.all_pass() ? kExitOk : kExitChecksFailed;
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["family"] = sc.family;
  j["error"] = sc.error;
  j["sigma"] = sc.sigma;
  j["pbeta"] = sc.pbeta;
  j["true_theta"] = sc.true_theta;
  j["contamination"] = sc.contamination;
  j["outlier_value"] = sc.outlier_value;
  j["grid_min"] = sc.grid_min;
  j["grid_max"] = sc.grid_max;
  j["grid_step"] = sc.grid_step;
  j["true_a"] = sc.true_a;
  j["true_b"] = sc.true_b;
  j["a_half_range"] = sc.a_half_range;
  j["b_half_range"] = sc.b_half_range;
  j["ab_step"] = sc.ab_step;
  j["alphabet_theta"] = sc.alphabet_theta;
  j["alphabet"] = sc.alphabet;
  j["depth_cap"] = sc.depth_cap;
  j["edges"] = sc.edges;
  j["true_masses"] = std::vector<double>(sc.true_masses.data(),
                                         sc.true_masses.data() + sc.true_masses.size());
  j["resolution"] = sc.resolution;
  j["ns"] = sc.ns;
  j["replications"] = sc.replications;
  j["seed"] = sc.seed;
  j["estimators"] = sc.estimators;
  return j;
}

Scenario scenario_from_json(const json& j, const std::string& where) {
  require_keys(j, where,
               {"name", "family", "error", "sigma", "pbeta", "true_theta", "contamination",
                "outlier_value", "grid_min", "grid_max", "grid_step", "true_a", "true_b",
                "a_half_range", "b_half_range", "ab_step", "alphabet_theta", "alphabet",
                "depth_cap", "edges", "true_masses", "resolution", "ns", "replications", "seed",
                "estimators", "threads"});
  Scenario sc;
  sc.name = get_or<std::string>(j, "name", sc.name);
  sc.family = get_or<std::string>(j, "family", sc.family);
  sc.error = get_or<std::string>(j, "error", sc.error);
  sc.sigma = get_or<double>(j, "sigma", sc.sigma);
  sc.pbeta = get_or<double>(j, "pbeta", sc.pbeta);
  sc.true_theta = get_or<double>(j, "true_theta", sc.true_theta);
  sc.contamination = get_or<double>(j, "contamination", sc.contamination);
  sc.outlier_value = get_or<double>(j, "outlier_value", sc.outlier_value);
  sc.grid_min = get_or<double>(j, "grid_min", sc.grid_min);
  sc.grid_max = get_or<double>(j, "grid_max", sc.grid_max);
  sc.grid_step = get_or<double>(j, "grid_step", sc.grid_step);
  sc.true_a = get_or<double>(j, "true_a", sc.true_a);
  sc.true_b = get_or<double>(j, "true_b", sc.true_b);
  sc.a_half_range = get_or<double>(j, "a_half_range", sc.a_half_range);
  sc.b_half_range = get_or<double>(j, "b_half_range", sc.b_half_range);
  sc.ab_step = get_or<double>(j, "ab_step", sc.ab_step);
  sc.alphabet_theta = get_or<std::vector<int>>(j, "alphabet_theta", sc.alphabet_theta);
  sc.alphabet = get_or<int>(j, "alphabet", sc.alphabet);
  sc.depth_cap = get_or<int>(j, "depth_cap", sc.depth_cap);
  sc.edges = get_or<std::vector<double>>(j, "edges", sc.edges);
  if (j.contains("true_masses")) {
    const auto m = j.at("true_masses").get<std::vector<double>>();
    sc.true_masses = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<long>(m.size()));
  }
  sc.resolution = get_or<int>(j, "resolution", sc.resolution);
  sc.ns = get_or<std::vector<int>>(j, "ns", sc.ns);
  sc.replications = get_or<int>(j, "replications", sc.replications);
  sc.seed = get_or<std::uint64_t>(j, "seed", sc.seed);
  sc.estimators = get_or<std::vector<std::string>>(j, "estimators", sc.estimators);
  sc.threads = get_or<int>(j, "threads", sc.threads);
  return sc;
}

}  // namespace

int run_command(const json& config, const Options& opts, json* report_out) {
  try {
    require_keys(config, "config",
                 {"command", "model", "family", "scenario", "data", "out", "seed", "threads",
                  "tolerances", "verify"});
    if (config.contains("tolerances"))
      require_keys(config.at("tolerances"), "tolerances", {"affinity_tol"});
    Options effective = opts;
    if (!opts.seed && config.contains("seed"))
      effective.seed = config.at("seed").get<std::uint64_t>();
    if (opts.threads == 0 && config.contains("threads"))
      effective.threads = config.at("threads").get<int>();
    if (config.contains("out") && opts.out_dir == ".")
      effective.out_dir = config.at("out").get<std::string>();
    std::filesystem::create_directories(effective.out_dir);

    const std::string cmd = get_req<std::string>(config, "command", "config");
    if (cmd == "estimate") return cmd_estimate(config, effective, report_out);
    if (cmd == "select") return cmd_select(config, effective, report_out);
    if (cmd == "simulate") return cmd_simulate(config, effective, report_out);
    if (cmd == "verify") return cmd_verify(config, effective, report_out);
    throw ConfigError("config: unknown command '" + cmd + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace rho::cli
