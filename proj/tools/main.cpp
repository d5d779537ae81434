#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "screening/advisor.hpp"
#include "screening/model.hpp"
#include "screening/partition.hpp"

using nlohmann::json;
using namespace screening;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::vector<double> parse_grid(const std::string& s) {
  if (s.rfind("lin:", 0) == 0 || s.rfind("log:", 0) == 0) {
    const bool logs = s[1] == 'o';
    double lo = 0.0, hi = 0.0;
    int n = 0;
    if (std::sscanf(s.c_str() + 4, "%lf,%lf,%d", &lo, &hi, &n) != 3 || n < 1)
      throw ConfigError("bad grid spec: " + s);
    if (logs && (!(lo > 0.0) || !(hi > 0.0)))
      throw ConfigError("log grid needs positive endpoints: " + s);
    std::vector<double> g;
    g.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : double(i) / (n - 1);
      g.push_back(logs ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                       : lo + f * (hi - lo));
    }
    return g;
  }
  std::vector<double> g;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      g.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw ConfigError("bad grid entry: " + tok);
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      throw ConfigError("bad grid entry: " + tok);
    }
  }
  if (g.empty()) throw ConfigError("empty grid spec");
  return g;
}

std::vector<double> ascending_grid(const std::string& s, const char* what) {
  std::vector<double> g = parse_grid(s);
  if (!std::is_sorted(g.begin(), g.end()))
    throw ConfigError(std::string(what) + " grid must be ascending");
  return g;
}

Technology parse_technology(const std::string& s) {
  if (s == "mult" || s == "multiplicative") return Technology::Multiplicative;
  if (s == "add" || s == "additive") return Technology::Additive;
  throw ConfigError("unknown technology: " + s);
}

PostingCost parse_pcost(const std::string& s) {
  try {
    if (s.empty() || s == "none") return PostingCost::none();
    if (s.rfind("linear:", 0) == 0) return PostingCost::linear(std::stod(s.substr(7)));
    if (s.rfind("power:", 0) == 0) {
      double c = 0.0, p = 0.0;
      if (std::sscanf(s.c_str() + 6, "%lf,%lf", &c, &p) != 2)
        throw ConfigError("bad posting cost: " + s);
      return PostingCost::power(c, p);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("bad posting cost '" + s + "': " + e.what());
  }
  throw ConfigError("unknown posting cost: " + s);
}

Regime parse_regime(const std::string& s) {
  if (s == "naive") return Regime::naive();
  if (s == "separating" || s == "separating-conjecture") return Regime::separating_conjecture();
  if (s.rfind("pooled:", 0) == 0) {
    double a = 0.0, b = 0.0;
    if (std::sscanf(s.c_str() + 7, "%lf,%lf", &a, &b) != 2)
      throw ConfigError("bad pooled regime spec: " + s);
    try {
      return Regime::pooled(a, b);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad pooled block: ") + e.what());
    }
  }
  throw ConfigError("unknown regime: " + s);
}

struct RunConfig {
  Primitives prim{};
  SeparatingKnob knob{};
  TestNoise noise{};
  std::string technology_spec = "mult";
  std::string pcost_spec = "none";
  std::string regime_spec = "naive";
  std::string T_grid_spec = "log:1e-4,10,60";
  std::string lambda_grid_spec;  // empty: the mixed log/linear default
  std::string V_grid_spec = "0.5,1,2";
  std::string gamma_grid_spec;  // empty: {gamma} for partition, 1.5,2,3 for boundary
  std::string theta_grid_spec = "lin:0,1,21";
  std::string axis = "V";
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 12345;
  long long draws = 1000000;
};

std::string json_grid_spec(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += fmt(v[i].get<double>());
    }
    return s;
  }
  throw ConfigError("grid value must be a string or an array of numbers");
}

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse failure: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  auto num = [&](const char* k, double& dst) {
    if (j.contains(k)) dst = j.at(k).get<double>();
  };
  num("V", c.prim.V);
  num("gamma", c.prim.gamma);
  num("lambda", c.prim.lambda);
  num("alpha", c.knob.alpha);
  num("eta_plus", c.noise.eta_plus);
  num("eta_minus", c.noise.eta_minus);
  if (j.contains("technology")) c.technology_spec = j.at("technology").get<std::string>();
  if (j.contains("posting_cost")) {
    const auto& v = j.at("posting_cost");
    if (v.is_string()) {
      c.pcost_spec = v.get<std::string>();
    } else {
      const std::string kind = v.at("kind").get<std::string>();
      std::string spec = kind;
      if (v.contains("params") && !v.at("params").empty()) {
        spec += ':';
        const auto& ps = v.at("params");
        for (std::size_t i = 0; i < ps.size(); ++i) {
          if (i) spec += ',';
          spec += fmt(ps[i].get<double>());
        }
      }
      c.pcost_spec = spec;
    }
  }
  if (j.contains("regime")) {
    const auto& v = j.at("regime");
    if (v.is_string()) {
      c.regime_spec = v.get<std::string>();
    } else {
      const std::string kind = v.at("kind").get<std::string>();
      c.regime_spec = kind == "pooled" ? "pooled:" + fmt(v.at("a").get<double>()) + "," +
                                             fmt(v.at("b").get<double>())
                                       : kind;
    }
  }
  auto grid = [&](const char* k, std::string& dst) {
    if (j.contains(k)) dst = json_grid_spec(j.at(k));
  };
  grid("T_grid", c.T_grid_spec);
  grid("lambda_grid", c.lambda_grid_spec);
  grid("V_grid", c.V_grid_spec);
  grid("gamma_grid", c.gamma_grid_spec);
  grid("theta_grid", c.theta_grid_spec);
  if (j.contains("axis")) c.axis = j.at("axis").get<std::string>();
  if (j.contains("out")) c.out_path = j.at("out").get<std::string>();
  if (j.contains("format")) c.format = j.at("format").get<std::string>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("draws")) c.draws = j.at("draws").get<long long>();
}

std::string param_comment(const RunConfig& c, const std::string& cmd) {
  std::ostringstream ss;
  ss << "# command=" << cmd << " V=" << fmt(c.prim.V) << " gamma=" << fmt(c.prim.gamma)
     << " lambda=" << fmt(c.prim.lambda) << " alpha=" << fmt(c.knob.alpha)
     << " technology=" << c.technology_spec << " eta_plus=" << fmt(c.noise.eta_plus)
     << " eta_minus=" << fmt(c.noise.eta_minus) << " posting_cost=" << c.pcost_spec
     << " regime=" << c.regime_spec << " seed=" << c.seed << " draws=" << c.draws;
  return ss.str();
}

json param_json(const RunConfig& c, const std::string& cmd) {
  return json{{"command", cmd},
              {"V", c.prim.V},
              {"gamma", c.prim.gamma},
              {"lambda", c.prim.lambda},
              {"alpha", c.knob.alpha},
              {"technology", c.technology_spec},
              {"eta_plus", c.noise.eta_plus},
              {"eta_minus", c.noise.eta_minus},
              {"posting_cost", c.pcost_spec},
              {"regime", c.regime_spec},
              {"seed", c.seed},
              {"draws", c.draws}};
}

const char* class_label(PartitionClass k) {
  switch (k) {
    case PartitionClass::SeparatingByBounds:
      return "separating_by_bounds";
    case PartitionClass::Boundary:
      return "boundary";
    case PartitionClass::PoolingSustainableByBounds:
      return "pooling_sustainable_by_bounds";
  }
  return "boundary";
}

const char* taxonomy_label(TaxonomyReport::Kind k) {
  switch (k) {
    case TaxonomyReport::Kind::Separating:
      return "Separating";
    case TaxonomyReport::Kind::Pooling:
      return "Pooling";
    case TaxonomyReport::Kind::SemiSeparating:
      return "SemiSeparating";
  }
  return "Separating";
}

constexpr double kPolicyFlatTol = 1e-4;  // taxonomy flat-run tolerance for the policy command

int run_command(const std::string& cmd, const RunConfig& c, std::ostream& os) {
  validate(c.prim);
  c.knob.validate();
  validate(c.noise);
  const Technology tech = parse_technology(c.technology_spec);
  const PostingCost pcost = parse_pcost(c.pcost_spec);
  const Regime regime = parse_regime(c.regime_spec);
  if (c.format != "csv" && c.format != "json") throw ConfigError("unknown format: " + c.format);
  const bool csv = c.format == "csv";

  json out_json;
  if (!csv) out_json["params"] = param_json(c, cmd);
  if (csv) os << param_comment(c, cmd) << "\n";

  if (cmd == "effort") {
    const std::vector<double> thetas = ascending_grid(c.theta_grid_spec, "theta");
    // separating conjectures need a difficulty to collapse on: first T-grid entry
    const double T0 = regime.kind() == Regime::Kind::SeparatingConjecture
                          ? ascending_grid(c.T_grid_spec, "T").front()
                          : 0.0;
    const ComplexityBelief belief = regime.belief_at(T0, c.prim.lambda);
    json rows = json::array();
    if (csv) os << "theta_star,e_pass,e_fail\n";
    for (double th : thetas) {
      auto [pass, fail] = effort_pair(th, belief, tech, c.noise, c.prim);
      if (csv)
        os << fmt(th) << ',' << fmt(pass.e) << ',' << fmt(fail.e) << "\n";
      else
        rows.push_back({{"theta_star", th}, {"e_pass", pass.e}, {"e_fail", fail.e}});
    }
    if (!csv) out_json["rows"] = std::move(rows);
  } else if (cmd == "objective-surface") {
    const std::vector<double> Ts = ascending_grid(c.T_grid_spec, "T");
    const std::vector<double> thetas = ascending_grid(c.theta_grid_spec, "theta");
    json rows = json::array();
    if (csv) os << "T,theta_star,U\n";
    for (double T : Ts)
      for (double th : thetas) {
        const ObjectiveBreakdown o = objective(T, th, regime, c.prim, tech, c.noise, pcost);
        if (csv)
          os << fmt(T) << ',' << fmt(th) << ',' << fmt(o.total) << "\n";
        else
          rows.push_back({{"T", T}, {"theta_star", th}, {"U", o.total}});
      }
    if (!csv) out_json["rows"] = std::move(rows);
  } else if (cmd == "policy") {
    const std::vector<double> Ts = ascending_grid(c.T_grid_spec, "T");
    const PolicyCurve curve = policy_curve(Ts, regime, c.prim, tech, c.noise, pcost);
    const TaxonomyReport tax = classify_policy(curve, kPolicyFlatTol);
    json rows = json::array();
    if (csv) os << "T,theta_star,value\n";
    for (std::size_t i = 0; i < Ts.size(); ++i) {
      if (csv)
        os << fmt(curve.T_grid[i]) << ',' << fmt(curve.theta_values[i]) << ','
           << fmt(curve.values[i]) << "\n";
      else
        rows.push_back({{"T", curve.T_grid[i]},
                        {"theta_star", curve.theta_values[i]},
                        {"value", curve.values[i]}});
    }
    if (csv) {
      os << "# taxonomy=" << taxonomy_label(tax.kind) << " flagged=" << (tax.flagged ? 1 : 0)
         << "\n";
      for (const PooledBlock& b : tax.blocks)
        os << "# block T1=" << fmt(b.T1) << " T2=" << fmt(b.T2)
           << " theta_bar=" << fmt(b.theta_bar) << "\n";
    } else {
      out_json["rows"] = std::move(rows);
      json blocks = json::array();
      for (const PooledBlock& b : tax.blocks)
        blocks.push_back({{"T1", b.T1}, {"T2", b.T2}, {"theta_bar", b.theta_bar}});
      out_json["taxonomy"] = {{"class", taxonomy_label(tax.kind)},
                              {"flagged", tax.flagged},
                              {"blocks", std::move(blocks)}};
    }
  } else if (cmd == "partition") {
    const std::vector<double> gammas = c.gamma_grid_spec.empty()
                                           ? std::vector<double>{c.prim.gamma}
                                           : ascending_grid(c.gamma_grid_spec, "gamma");
    const std::vector<double> lambdas = c.lambda_grid_spec.empty()
                                            ? default_lambda_grid()
                                            : ascending_grid(c.lambda_grid_spec, "lambda");
    json rows = json::array();
    if (csv) os << "lambda,V,gamma,alpha,u_sep,u_pool,phi,class\n";
    for (double g : gammas)
      for (double lam : lambdas) {
        const PartitionPoint p = phi(lam, c.prim.V, g, c.knob);
        if (csv)
          os << fmt(p.lambda) << ',' << fmt(p.V) << ',' << fmt(p.gamma) << ',' << fmt(p.alpha)
             << ',' << fmt(p.u_sep) << ',' << fmt(p.u_pool) << ',' << fmt(p.phi) << ','
             << class_label(p.classification) << "\n";
        else
          rows.push_back({{"lambda", p.lambda},
                          {"V", p.V},
                          {"gamma", p.gamma},
                          {"alpha", p.alpha},
                          {"u_sep", p.u_sep},
                          {"u_pool", p.u_pool},
                          {"phi", p.phi},
                          {"class", class_label(p.classification)}});
      }
    if (!csv) out_json["rows"] = std::move(rows);
  } else if (cmd == "boundary") {
    BoundaryCurve curve;
    if (c.axis == "V") {
      curve = boundary_vs_V(ascending_grid(c.V_grid_spec, "V"), c.prim.gamma, c.knob);
    } else if (c.axis == "gamma") {
      const std::vector<double> gs = c.gamma_grid_spec.empty()
                                         ? std::vector<double>{1.5, 2.0, 3.0}
                                         : ascending_grid(c.gamma_grid_spec, "gamma");
      curve = boundary_vs_gamma(gs, c.prim.V, c.knob);
    } else {
      throw ConfigError("unknown axis: " + c.axis);
    }
    json rows = json::array();
    if (csv) os << "axis_value,lambda_star,status\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
      const auto& ls = curve.lambda_star_values[i];
      if (csv)
        os << fmt(curve.grid[i]) << ',' << (ls ? fmt(*ls) : "") << ','
           << (ls ? "ok" : "no_crossing") << "\n";
      else
        rows.push_back({{"axis_value", curve.grid[i]},
                        {"lambda_star", ls ? json(*ls) : json(nullptr)},
                        {"status", ls ? "ok" : "no_crossing"}});
    }
    if (!csv) out_json["rows"] = std::move(rows);
  } else if (cmd == "voi") {
    const std::vector<double> Ts = ascending_grid(c.T_grid_spec, "T");
    const VoiResult r = value_of_information(c.prim, tech, c.noise, pcost, Ts);
    if (csv) {
      os << "value,raw,informed,uninformed,best_constant_theta\n";
      os << fmt(r.value) << ',' << fmt(r.raw) << ',' << fmt(r.informed) << ','
         << fmt(r.uninformed) << ',' << fmt(r.best_constant_theta) << "\n";
    } else {
      out_json["result"] = {{"value", r.value},
                            {"raw", r.raw},
                            {"informed", r.informed},
                            {"uninformed", r.uninformed},
                            {"best_constant_theta", r.best_constant_theta}};
    }
  } else if (cmd == "asymptotics") {
    const AsymptoticsReport r = asymptotic_check(c.prim.V, c.prim.gamma, c.knob);
    if (csv) {
      os << "slope_value,slope_target,slope_rel_err,exponent_value,exponent_target,"
            "exponent_rel_err,sep_limit_value,sep_limit_target,sep_limit_gap,pool_limit_value,"
            "pool_limit_target,pool_limit_gap\n";
      os << fmt(r.slope_value) << ',' << fmt(r.slope_target) << ',' << fmt(r.slope_rel_err) << ','
         << fmt(r.exponent_value) << ',' << fmt(r.exponent_target) << ','
         << fmt(r.exponent_rel_err) << ',' << fmt(r.sep_limit_value) << ','
         << fmt(r.sep_limit_target) << ',' << fmt(r.sep_limit_gap) << ','
         << fmt(r.pool_limit_value) << ',' << fmt(r.pool_limit_target) << ','
         << fmt(r.pool_limit_gap) << "\n";
    } else {
      out_json["result"] = {{"slope_value", r.slope_value},
                            {"slope_target", r.slope_target},
                            {"slope_rel_err", r.slope_rel_err},
                            {"exponent_value", r.exponent_value},
                            {"exponent_target", r.exponent_target},
                            {"exponent_rel_err", r.exponent_rel_err},
                            {"sep_limit_value", r.sep_limit_value},
                            {"sep_limit_target", r.sep_limit_target},
                            {"sep_limit_gap", r.sep_limit_gap},
                            {"pool_limit_value", r.pool_limit_value},
                            {"pool_limit_target", r.pool_limit_target},
                            {"pool_limit_gap", r.pool_limit_gap}};
    }
  } else {
    throw ConfigError("unknown command: " + cmd);
  }

  if (!csv) os << out_json.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;

  // config file first, so explicit flags can override its values
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0)
      path = a.substr(9);
    if (!path.empty()) {
      try {
        apply_config_file(cfg, path);
      } catch (const std::exception& e) {
        std::cerr << json{{"kind", "config"}, {"error", e.what()}}.dump() << "\n";
        return 2;
      }
    }
  }

  CLI::App app{"numerical engine for the advisor-agent threshold-test model"};
  std::string config_path_unused;
  app.add_option("--config", config_path_unused, "JSON config file (flags override its values)");
  app.add_option("--V", cfg.prim.V, "success payoff");
  app.add_option("--gamma", cfg.prim.gamma, "effort cost exponent (> 1)");
  app.add_option("--lambda", cfg.prim.lambda, "exponential rate of difficulty");
  app.add_option("--alpha", cfg.knob.alpha, "separating-family knob in (0,1]");
  app.add_option("--technology", cfg.technology_spec, "mult | add");
  app.add_option("--eta-plus", cfg.noise.eta_plus, "false-positive rate");
  app.add_option("--eta-minus", cfg.noise.eta_minus, "false-negative rate");
  app.add_option("--posting-cost", cfg.pcost_spec, "none | linear:slope | power:coef,exp");
  app.add_option("--regime", cfg.regime_spec, "naive | separating | pooled:a,b");
  app.add_option("--T-grid", cfg.T_grid_spec, "grid spec: lin:lo,hi,n | log:lo,hi,n | v1,v2,...");
  app.add_option("--lambda-grid", cfg.lambda_grid_spec, "lambda grid spec");
  app.add_option("--V-grid", cfg.V_grid_spec, "V grid spec");
  app.add_option("--gamma-grid", cfg.gamma_grid_spec, "gamma grid spec");
  app.add_option("--theta-grid", cfg.theta_grid_spec, "threshold grid spec");
  app.add_option("--axis", cfg.axis, "boundary axis: V | gamma");
  app.add_option("--out", cfg.out_path, "output path (default stdout)");
  app.add_option("--format", cfg.format, "csv | json");
  app.add_option("--seed", cfg.seed, "RNG seed");
  app.add_option("--draws", cfg.draws, "Monte Carlo draw count");

  for (const char* name : {"effort", "objective-surface", "policy", "partition", "boundary",
                           "voi", "asymptotics"})
    app.add_subcommand(name)->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    std::ofstream file;
    if (!cfg.out_path.empty()) {
      file.open(cfg.out_path);
      if (!file) throw ConfigError("cannot open output path: " + cfg.out_path);
    }
    return run_command(cmd, cfg, cfg.out_path.empty() ? std::cout : file);
  } catch (const ConfigError& e) {
    std::cerr << json{{"kind", "config"}, {"error", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"kind", "config"}, {"error", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    // parameter validation failures are configuration mistakes, not numerics
    std::cerr << json{{"kind", "config"}, {"error", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"kind", "numerical"}, {"error", e.what()}}.dump() << "\n";
    return 3;
  }
}
