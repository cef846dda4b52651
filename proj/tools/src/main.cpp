#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "steinpp/bounds.hpp"
#include "steinpp/carrier.hpp"
#include "steinpp/imdeath.hpp"
#include "steinpp/models.hpp"
#include "steinpp/palm.hpp"
#include "steinpp/rng.hpp"
#include "steinpp/univariate.hpp"
#include "steinpp_tools/checks.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace steinpp;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file: " + path.string());
  out << content;
}

/// Deterministic hash-driven value in [-1, 1], an arbitrary test function of
/// (atom, configuration) for the identity demonstrations.
double pseudo_value(std::uint64_t salt, int atom, const CountConfig& c) {
  std::uint64_t h = mix64(salt ^ mix64(static_cast<std::uint64_t>(atom) + 0x51u));
  for (int v : c) h = mix64(h ^ (static_cast<std::uint64_t>(v) + 0x9e37u));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0;
}

int run_verify(const std::string& suite, const std::string& out_dir) {
  const std::vector<int> indices = checks::suite_criteria(suite);
  json results = json::array();
  bool all_pass = true;
  for (int i : indices) {
    const checks::CheckResult res = checks::run_check(i);
    all_pass = all_pass && res.pass;
    std::cout << (res.pass ? "PASS " : "FAIL ") << res.name << ": " << res.detail << "\n";
    results.push_back({{"criterion", i}, {"name", res.name}, {"pass", res.pass}, {"detail", res.detail}});
  }
  std::cout << "suite " << suite << ": " << (all_pass ? "pass" : "FAIL") << "\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const json report = {{"suite", suite}, {"pass", all_pass}, {"results", results}};
    write_file(fs::path(out_dir) / "verify_report.json", report.dump(2) + "\n");
  }
  return all_pass ? 0 : 1;
}

std::vector<double> require_doubles(const json& cfg, const std::string& key) {
  if (!cfg.contains(key) || !cfg.at(key).is_array())
    throw ConfigError("config field '" + key + "' must be an array of numbers");
  return cfg.at(key).get<std::vector<double>>();
}

std::string experiment_bernoulli(const json& cfg, std::uint64_t, const std::string& mode, long long,
                                 json& extra) {
  if (!cfg.contains("vectors") || !cfg.at("vectors").is_array())
    throw ConfigError("bernoulli-bound: config field 'vectors' must be an array of probability arrays");
  std::ostringstream csv;
  csv << "index,n,lambda,sum_p_squared,sharp,crude,crude_valid,distance,distance_interval\n";
  int exact_rows = 0;
  int index = 0;
  for (const json& entry : cfg.at("vectors")) {
    BernoulliVector bv;
    bv.p = entry.get<std::vector<double>>();
    const BoundReport rep = independent_bernoulli_bound(bv);
    const double sharp = rep.term("sharp");
    const double crude = rep.term("crude");
    const bool crude_valid = std::isfinite(crude);
    const int n = static_cast<int>(bv.p.size());
    std::string distance, interval;
    if (mode == "exact" && n <= 6) {
      std::vector<double> positions;
      std::vector<int> caps;
      for (int i = 0; i < n; ++i) {
        positions.push_back((i + 1.0) / (n + 1.0));
        caps.push_back(poisson_cap_for_tail(bv.p[i], 1e-10));
      }
      const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval(positions);
      const ConfigDistribution d = bernoulli_process_dist(carrier, bv.p);
      const ConfigDistribution po = truncated_poisson_dist(carrier, bv.p, caps, 2e-9);
      const TransportDistance d2 = exact_d2(d, po);
      distance = fmt17(d2.value);
      interval = fmt17(d2.interval);
      ++exact_rows;
    }
    csv << index << ',' << n << ',' << fmt17(bv.lambda()) << ',' << fmt17(bv.sum_p_squared()) << ','
        << fmt17(sharp) << ',' << fmt17(crude) << ',' << (crude_valid ? 1 : 0) << ',' << distance << ','
        << interval << "\n";
    ++index;
  }
  extra["exact_distance_rows"] = exact_rows;
  return csv.str();
}

std::string experiment_matern(const json& cfg, std::uint64_t seed, const std::string&, long long reps,
                              json& extra) {
  if (!cfg.contains("nu")) throw ConfigError("matern-scaling: config field 'nu' is required");
  const double nu = cfg.at("nu").get<double>();
  const int d = cfg.value("d", 1);
  const std::vector<double> grid = require_doubles(cfg, "r_grid");
  const int n_reps = static_cast<int>(reps > 0 ? reps : 2000);
  const MaternScalingStudy study = matern_scaling_study(nu, d, grid, n_reps, seed);
  std::ostringstream csv;
  csv << "r,bound,bound_se,self_interaction,intensity_product,slope\n";
  for (std::size_t k = 0; k < study.r.size(); ++k) {
    const BoundReport& rep = study.reports[k];
    csv << fmt17(study.r[k]) << ',' << fmt17(study.bound_value[k]) << ',' << fmt17(study.bound_se[k])
        << ',' << fmt17(rep.term("self_interaction")) << ',' << fmt17(rep.term("intensity_product")) << ','
        << fmt17(study.slope) << "\n";
  }
  extra["slope"] = study.slope;
  return csv.str();
}

std::string experiment_renewal(const json& cfg, std::uint64_t, const std::string&, long long, json& extra) {
  if (!cfg.contains("points") || !cfg.at("points").is_array())
    throw ConfigError("renewal-bound: config field 'points' must be an array of {g, f} objects");
  std::ostringstream csv;
  csv << "index,n,bound,valid,reason,numerator,denominator\n";
  int invalid_rows = 0;
  int index = 0;
  for (const json& entry : cfg.at("points")) {
    const std::vector<double> g = require_doubles(entry, "g");
    const std::vector<double> f = require_doubles(entry, "f");
    const BoundReport rep = renewal_superposition_bound(g, f);
    if (!rep.valid) ++invalid_rows;
    const BoundTerm* num = rep.find("numerator");
    const BoundTerm* den = rep.find("denominator");
    csv << index << ',' << g.size() << ',' << fmt17(rep.value) << ',' << (rep.valid ? 1 : 0) << ','
        << rep.invalid_reason << ',' << (num ? fmt17(num->value) : "") << ','
        << (den ? fmt17(den->value) : "") << "\n";
    ++index;
  }
  extra["invalid_rows"] = invalid_rows;
  return csv.str();
}

std::string experiment_stein_factor(const json& cfg, std::uint64_t seed, const std::string&, long long reps,
                                    json& extra) {
  const int cases = cfg.value("cases", 12);
  const int n_reps = static_cast<int>(reps > 0 ? reps : 4000);
  const double tstar = cfg.value("tstar", 15.0);
  const int max_atoms = cfg.value("max_atoms", 5);
  if (cases <= 0 || max_atoms <= 0 || max_atoms > 8 || !(tstar > 0.0))
    throw ConfigError("stein-factor: need cases > 0, 0 < max_atoms <= 8, tstar > 0");
  Rng rng(derive_seed(seed, 0));
  const int sizes[4] = {0, 1, 3, 8};
  std::ostringstream csv;
  csv << "case,atoms,lambda,xi_size,estimate,se,bound,within\n";
  int outside = 0;
  for (int t = 0; t < cases; ++t) {
    const int k = 1 + t % max_atoms;
    std::vector<double> positions;
    std::vector<double> masses;
    for (int j = 0; j < k; ++j) {
      positions.push_back((j + 0.5 + 0.3 * (rng.uniform() - 0.5)) / k);
      masses.push_back(rng.uniform(0.3, 1.5));
    }
    const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval(positions);
    const SpatialIntensity intensity = SpatialIntensity::discrete(carrier, masses);
    Configuration xi;
    for (int j = 0; j < sizes[t % 4]; ++j)
      xi.add(Point::atom_index(static_cast<int>(rng.uniform_index(k))));
    const Point alpha = Point::atom_index(static_cast<int>(rng.uniform_index(k)));
    const Point beta = Point::atom_index(static_cast<int>(rng.uniform_index(k)));
    const Configuration anchor = sample_poisson_process(intensity, derive_seed(seed, 1000 + t));
    const AnchorTestFunction h(carrier, anchor);
    const McEstimate est =
        estimate_second_difference(h, xi, alpha, beta, intensity, tstar, n_reps, derive_seed(seed, 2000 + t));
    const double bound = stein_factor_bound(intensity.total(), xi.size());
    const bool within =
        std::fabs(est.estimate) <= bound + 3.0 * est.se + 4.0 * std::exp(-2.0 * tstar);
    if (!within) ++outside;
    csv << t << ',' << k << ',' << fmt17(intensity.total()) << ',' << xi.size() << ','
        << fmt17(est.estimate) << ',' << fmt17(est.se) << ',' << fmt17(bound) << ',' << (within ? 1 : 0)
        << "\n";
  }
  extra["cases_outside_envelope"] = outside;
  return csv.str();
}

std::string experiment_palm_exact(const json& cfg, std::uint64_t seed, const std::string&, long long,
                                  json& extra) {
  const std::vector<double> means = require_doubles(cfg, "means");
  const int n = static_cast<int>(means.size());
  std::vector<int> caps;
  if (cfg.contains("caps")) {
    caps = cfg.at("caps").get<std::vector<int>>();
    if (static_cast<int>(caps.size()) != n) throw ConfigError("palm-exact: caps must match means in length");
  } else {
    for (double m : means) caps.push_back(poisson_cap_for_tail(m, 1e-9));
  }
  std::vector<double> positions;
  for (int i = 0; i < n; ++i) positions.push_back((i + 1.0) / (n + 1.0));
  const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval(positions);
  const ConfigDistribution d = truncated_poisson_dist(carrier, means, caps);
  std::ostringstream csv;
  csv << "check,atom,lhs,rhs,gap\n";
  const std::uint64_t salt = derive_seed(seed, 42);
  const auto f = [salt](int atom, const CountConfig& c) { return pseudo_value(salt, atom, c); };
  const auto [lhs, rhs] = campbell_check(d, f);
  csv << "campbell,-1," << fmt17(lhs) << ',' << fmt17(rhs) << ',' << fmt17(std::fabs(lhs - rhs)) << "\n";
  double worst = std::fabs(lhs - rhs);
  for (int a = 0; a < n; ++a) {
    if (caps[a] < 1 || means[a] <= 0.0) continue;
    std::vector<int> lowered = caps;
    lowered[a] -= 1;
    const ConfigDistribution ref = truncated_poisson_dist(carrier, means, lowered);
    const double tv = config_tv(palm(d, a), shift_up(ref, a));
    csv << "palm_shift," << a << ',' << fmt17(tv) << ',' << fmt17(ref.truncated_mass) << ','
        << fmt17(tv - ref.truncated_mass) << "\n";
    worst = std::max(worst, tv - ref.truncated_mass);
  }
  extra["worst_gap"] = worst;
  extra["truncated_mass"] = d.truncated_mass;
  return csv.str();
}

int run_experiment(const std::string& config_path, bool seed_set, std::uint64_t seed_cli,
                   const std::string& mode_cli, long long reps_cli, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config file: " + config_path);
  json cfg = json::parse(in);
  if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
  const std::string name = cfg.value("experiment", "");
  if (name.empty()) throw ConfigError("config field 'experiment' is required");
  if (seed_set) cfg["seed"] = seed_cli;
  if (!mode_cli.empty()) cfg["mode"] = mode_cli;
  if (reps_cli >= 0) cfg["reps"] = reps_cli;
  if (!cfg.contains("seed") || !cfg.at("seed").is_number_integer())
    throw ConfigError("a master seed is required (integer 'seed' field or --seed)");
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const std::string mode = cfg.value("mode", "exact");
  if (mode != "exact" && mode != "mc") throw ConfigError("mode must be 'exact' or 'mc'");
  long long reps = -1;
  if (cfg.contains("reps")) {
    reps = cfg.at("reps").get<long long>();
    if (reps <= 0) throw ConfigError("reps must be positive");
  }

  json extra = json::object();
  std::string csv;
  if (name == "bernoulli-bound")
    csv = experiment_bernoulli(cfg, seed, mode, reps, extra);
  else if (name == "matern-scaling")
    csv = experiment_matern(cfg, seed, mode, reps, extra);
  else if (name == "renewal-bound")
    csv = experiment_renewal(cfg, seed, mode, reps, extra);
  else if (name == "stein-factor")
    csv = experiment_stein_factor(cfg, seed, mode, reps, extra);
  else if (name == "palm-exact")
    csv = experiment_palm_exact(cfg, seed, mode, reps, extra);
  else
    throw ConfigError("unknown experiment: " + name);

  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  const std::string csv_name = name + ".csv";
  write_file(dir / csv_name, csv);
  json meta = {{"experiment", name},
               {"config_hash", hash_hex(fnv1a(cfg.dump()))},
               {"master_seed", seed},
               {"mode", mode},
               {"reps", reps},
               {"library_version", kVersion},
               {"parameters", cfg},
               {"outputs", json::array({csv_name})},
               {"results", extra}};
  write_file(dir / (name + ".meta.json"), meta.dump(2) + "\n");
  std::cout << "wrote " << (dir / csv_name).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson process approximation toolkit"};
  app.require_subcommand(1);

  std::string suite = "all";
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "run a named verification suite");
  verify->add_option("suite", suite,
                     "suite name: univariate, metrics, palm, imdeath, models, bounds, all");
  verify->add_option("--out", verify_out, "directory for the JSON report");

  std::string config_path;
  std::string exp_out = ".";
  std::string mode_cli;
  std::uint64_t seed_cli = 0;
  long long reps_cli = -1;
  CLI::App* experiment = app.add_subcommand("experiment", "run a reproducible experiment from a config");
  experiment->add_option("--config", config_path, "JSON config file")->required();
  CLI::Option* seed_opt = experiment->add_option("--seed", seed_cli, "master seed (overrides the config)");
  experiment->add_option("--out", exp_out, "output directory");
  experiment->add_option("--mode", mode_cli, "evaluation mode")->check(CLI::IsMember({"exact", "mc"}));
  experiment->add_option("--reps", reps_cli, "Monte Carlo replications (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return run_verify(suite, verify_out);
    return run_experiment(config_path, seed_opt->count() > 0, seed_cli, mode_cli, reps_cli, exp_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
