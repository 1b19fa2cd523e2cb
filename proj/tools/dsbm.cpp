// dsbm: command-line front end (analyze, kappa, density, exponents, simulate, verify).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsbm/acceptance.hpp"
#include "dsbm/block_graph.hpp"
#include "dsbm/density.hpp"
#include "dsbm/dyson.hpp"
#include "dsbm/errors.hpp"
#include "dsbm/exponents.hpp"
#include "dsbm/io.hpp"
#include "dsbm/rmt.hpp"
#include "dsbm/structure.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Config {
  std::string input;
  std::string out;
  double tau_min = 1e-8;
  double tau_max = 1e-4;
  int tau_points = 5;
  std::string radii;
  int n = 400;
  int seeds = 5;
  std::uint64_t seed = 1;
  bool oracle = false;
  bool quick = false;
  std::string fixtures = DSBM_DEFAULT_FIXTURE_DIR;
};

std::vector<int> one_based(const std::vector<int>& v) {
  std::vector<int> out(v);
  for (int& x : out) ++x;
  return out;
}

json matrix_json(const dsbm::Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

void print_error(const std::string& code, const std::string& message, json extra = json::object()) {
  extra["error"] = code;
  extra["message"] = message;
  std::cerr << extra.dump() << std::endl;
}

json error_extra(const dsbm::Error& e) {
  json extra = json::object();
  if (const auto* ns = dynamic_cast<const dsbm::NoSupport*>(&e)) {
    extra["zero_block"] = {{"rows", one_based(ns->rows())}, {"cols", one_based(ns->cols())}};
  }
  return extra;
}

// Writes to <out>/<name> when --out is set, otherwise to stdout.
void emit(const Config& cfg, const std::string& name, const std::string& content) {
  if (cfg.out.empty()) {
    std::cout << content;
    return;
  }
  fs::create_directories(cfg.out);
  std::ofstream f(fs::path(cfg.out) / name, std::ios::binary);
  if (!f) throw dsbm::InvalidInput("cannot write " + (fs::path(cfg.out) / name).string());
  f << content;
}

// "lo:hi:count[:log]" or a comma-separated list.
std::vector<double> parse_radii(const std::string& text) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !std::isfinite(x)) throw CLI::ValidationError("--radii", "bad number '" + s + "'");
    return x;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "log")) {
      throw CLI::ValidationError("--radii", "expected lo:hi:count[:log]");
    }
    const double lo = number(parts[0]), hi = number(parts[1]);
    const double count = number(parts[2]);
    const bool log = parts.size() == 4;
    if (count < 1 || count != std::floor(count) || !(lo > 0.0) || !(hi >= lo)) {
      throw CLI::ValidationError("--radii", "need 0 < lo <= hi and a positive integer count");
    }
    const int c = static_cast<int>(count);
    for (int i = 0; i < c; ++i) {
      const double f = c == 1 ? 0.0 : static_cast<double>(i) / (c - 1);
      out.push_back(log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
    }
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
      const double x = number(part);
      if (!(x > 0.0)) throw CLI::ValidationError("--radii", "radii must be positive");
      out.push_back(x);
    }
  }
  if (out.empty()) throw CLI::ValidationError("--radii", "empty radius grid");
  return out;
}

std::vector<double> tau_grid(const Config& cfg) {
  std::vector<double> grid;
  for (int i = 0; i < cfg.tau_points; ++i) {
    const double f = cfg.tau_points == 1 ? 0.0 : static_cast<double>(i) / (cfg.tau_points - 1);
    grid.push_back(cfg.tau_max * std::pow(cfg.tau_min / cfg.tau_max, f));
  }
  return grid;
}

int cmd_analyze(const Config& cfg) {
  const dsbm::VarianceProfile m = dsbm::load_profile(cfg.input);
  const dsbm::ZeroPattern z = dsbm::zero_pattern(m);
  const dsbm::SupportWitness w = dsbm::has_support(z);
  const bool irreducible = dsbm::is_irreducible(z);
  json report = {{"K", m.size()}, {"irreducible", irreducible},
                 {"fully_indecomposable", dsbm::is_fully_indecomposable(z)},
                 {"primitive", dsbm::is_primitive(z)}};
  std::optional<std::pair<std::string, std::string>> failure;
  if (const auto* d = std::get_if<dsbm::PositiveDiagonal>(&w)) {
    report["support"] = true;
    report["witness"] = {{"type", "PositiveDiagonal"}, {"pi", one_based(d->pi.image())}};
    const dsbm::NormalForm nf = dsbm::normal_form(m);
    json blocks = json::array();
    for (int l = 0; l < nf.blocks(); ++l) {
      const dsbm::ZeroPattern bz = dsbm::zero_pattern(nf.block(l, l));
      blocks.push_back({{"label", l + 1}, {"size", nf.block_sizes[l]},
                        {"fully_indecomposable", dsbm::is_fully_indecomposable(bz)},
                        {"primitive", dsbm::is_primitive(bz)}});
    }
    report["normal_form"] = {{"q1", one_based(nf.q1.image())},
                             {"q2", one_based(nf.q2.image())},
                             {"L", nf.blocks()},
                             {"block_sizes", nf.block_sizes},
                             {"blocks", blocks},
                             {"s_tilde", matrix_json(nf.s_tilde)}};
  } else {
    const auto& b = std::get<dsbm::ZeroBlock>(w);
    report["support"] = false;
    report["witness"] = {{"type", "ZeroBlock"}, {"rows", one_based(b.rows)}, {"cols", one_based(b.cols)}};
    failure = {"NoSupport", "matrix has no support"};
  }
  if (irreducible) {
    report["rho"] = dsbm::spectral_radius(m).rho;
  } else if (!failure) {
    failure = {"NotIrreducible", "variance profile is not irreducible"};
  }
  emit(cfg, "analysis.json", report.dump(2) + "\n");
  if (failure) {
    json extra = json::object();
    if (!report["support"].get<bool>()) extra["zero_block"] = {{"rows", report["witness"]["rows"]}, {"cols", report["witness"]["cols"]}};
    print_error(failure->first, failure->second, extra);
    return kExitFailure;
  }
  return 0;
}

int cmd_kappa(const Config& cfg) {
  const dsbm::VarianceProfile m = dsbm::load_profile(cfg.input);
  emit(cfg, "kappa.json", dsbm::kappa_to_json(dsbm::kappa_of(m)) + "\n");
  return 0;
}

int cmd_density(const Config& cfg) {
  const dsbm::VarianceProfile m = dsbm::load_profile(cfg.input);
  std::vector<double> radii;
  if (cfg.radii.empty()) {
    const double edge = std::sqrt(dsbm::DysonSolver(m).rho());
    for (int i = 0; i < 20; ++i) radii.push_back(1e-4 * edge * std::pow(0.9 / 1e-4, i / 19.0));
  } else {
    radii = parse_radii(cfg.radii);
  }
  std::vector<dsbm::Complex> points(radii.begin(), radii.end());
  const std::vector<dsbm::DensityRow> rows = dsbm::density_grid(m, points, cfg.oracle);

  std::ostringstream csv;
  csv << "re,im,abs,sigma,method,residual" << (cfg.oracle ? ",sigma_integral" : "") << "\n";
  bool failed = false;
  for (const dsbm::DensityRow& r : rows) {
    csv << dsbm::format_double(r.z.real()) << "," << dsbm::format_double(r.z.imag()) << ","
        << dsbm::format_double(std::abs(r.z)) << ",";
    if (r.value) {
      csv << dsbm::format_double(r.value->sigma) << "," << dsbm::method_name(r.value->method) << ","
          << dsbm::format_double(r.value->residual);
    } else if (r.status == "OutOfBulk") {
      csv << dsbm::format_double(0.0) << ",OutOfBulk," << dsbm::format_double(0.0);
    } else {
      csv << "nan,Error:" << r.status << ",nan";
    }
    if (cfg.oracle) csv << "," << (r.oracle ? dsbm::format_double(r.oracle->sigma) : std::string("nan"));
    csv << "\n";
    if (r.status != "ok" && r.status != "OutOfBulk") {
      failed = true;
      print_error(r.status, r.error, {{"abs", std::abs(r.z)}});
    }
  }
  emit(cfg, "density.csv", csv.str());
  return failed ? kExitFailure : 0;
}

int cmd_exponents(const Config& cfg) {
  const dsbm::VarianceProfile m = dsbm::load_profile(cfg.input);
  const std::vector<double> grid = tau_grid(cfg);
  const dsbm::ExponentProfile e = dsbm::exponent_profile(m, grid);
  const dsbm::ScalingSlopes s = dsbm::scaling_check(m, grid);
  const dsbm::KappaResult k = dsbm::kappa_of(m);

  std::ostringstream csv;
  csv << "tau,k,f_k\n";
  for (int j = 0; j < e.slopes.cols(); ++j) {
    for (int l = 0; l < e.slopes.rows(); ++l) {
      csv << dsbm::format_double(grid[j + 1]) << "," << l + 1 << "," << dsbm::format_double(e.slopes(l, j)) << "\n";
    }
  }
  json weights = json::array();
  for (const dsbm::EdgeWeight& w : e.weights) {
    json labels = json::array();
    if (w.edge.lhd) labels.push_back("LHD");
    if (w.edge.prec) labels.push_back("PREC");
    weights.push_back({{"from", w.edge.from + 1}, {"to", w.edge.to + 1}, {"labels", labels}, {"weight", w.weight}});
  }
  const json summary = {{"tau_grid", grid},
                        {"f_hat", std::vector<double>(e.f_hat.data(), e.f_hat.data() + e.f_hat.size())},
                        {"delta", e.delta ? json(*e.delta) : json(nullptr)},
                        {"delta_hat", e.delta_hat},
                        {"slope_one_minus", s.slope_one_minus},
                        {"slope_vw", s.slope_vw},
                        {"min_max_defect", dsbm::min_max_defect(e).cwiseAbs().maxCoeff()},
                        {"successor_slack", dsbm::successor_slack(e)},
                        {"weights", weights},
                        {"kappa", k.kappa.str()},
                        {"kappa_value", k.kappa.to_double()}};
  emit(cfg, "exponents.csv", csv.str());
  emit(cfg, "exponents_summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_simulate(const Config& cfg) {
  const dsbm::VarianceProfile m = dsbm::load_profile(cfg.input);
  const double edge = std::sqrt(dsbm::DysonSolver(m).rho());
  std::vector<double> grid;
  if (cfg.radii.empty()) {
    for (int i = 0; i < 40; ++i) grid.push_back(0.02 + (0.999 * edge - 0.02) * i / 39.0);
  } else {
    grid = parse_radii(cfg.radii);
  }
  std::vector<std::uint64_t> seeds(cfg.seeds);
  std::iota(seeds.begin(), seeds.end(), cfg.seed);
  const std::vector<dsbm::TrialResult> trials = dsbm::run_trials(m, cfg.n, seeds, grid);
  const dsbm::KappaResult k = dsbm::kappa_of(m);

  json per_seed = json::array();
  double sup = 0.0, slope = 0.0;
  for (const dsbm::TrialResult& t : trials) {
    const std::string stem = "seed" + std::to_string(t.seed);
    std::ostringstream ev;
    ev << "re,im\n";
    for (const auto& z : t.sample.eigenvalues) ev << dsbm::format_double(z.real()) << "," << dsbm::format_double(z.imag()) << "\n";
    emit(cfg, "eigenvalues_" + stem + ".csv", ev.str());
    json sidecar = json::parse(dsbm::SBMSpec::from_profile(m, cfg.n, t.seed).to_json());
    sidecar["outlier_count"] = t.sample.outlier_count;
    sidecar["digest"] = t.digest;
    emit(cfg, "eigenvalues_" + stem + ".json", sidecar.dump(2) + "\n");
    std::ostringstream cdf;
    cdf << "t,empirical,theoretical\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      cdf << dsbm::format_double(grid[i]) << "," << dsbm::format_double(t.cdf.fraction[i]) << ","
          << dsbm::format_double(t.theoretical[i]) << "\n";
    }
    emit(cfg, "radial_cdf_" + stem + ".csv", cdf.str());
    per_seed.push_back({{"seed", t.seed}, {"sup_distance", t.sup_distance}, {"slope", t.slope},
                        {"outlier_count", t.sample.outlier_count}, {"digest", t.digest}});
    sup += t.sup_distance / trials.size();
    slope += t.slope / trials.size();
  }
  const json aggregate = {{"n", cfg.n}, {"K", m.size()}, {"seeds", seeds},
                          {"mean_sup_distance", sup}, {"mean_slope", slope},
                          {"slope_window", {5.0 / std::sqrt(cfg.n), 0.3}},
                          {"kappa", k.kappa.str()}, {"c_ns", k.c_ns.str()}, {"trials", per_seed}};
  emit(cfg, "simulation.json", aggregate.dump(2) + "\n");
  if (!cfg.out.empty()) std::cout << aggregate.dump() << "\n";
  return 0;
}

int cmd_verify(const Config& cfg) {
  dsbm::acceptance::SuiteOptions options;
  options.fixture_dir = cfg.fixtures;
  options.quick = cfg.quick;
  const auto results = dsbm::acceptance::run_suite(
      options, [](const dsbm::acceptance::CriterionResult& r) { std::cout << r.line() << std::endl; });
  bool ok = true;
  json report = json::array();
  for (const auto& r : results) {
    ok = ok && r.ok();
    report.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.status == dsbm::acceptance::CriterionResult::Status::Pass},
                      {"skipped", r.status == dsbm::acceptance::CriterionResult::Status::Skip},
                      {"detail", r.detail}, {"seconds", r.seconds}});
  }
  if (!cfg.out.empty()) emit(cfg, "verify.json", report.dump(2) + "\n");
  std::cout << (ok ? "verification passed" : "verification FAILED") << std::endl;
  if (!ok) print_error("VerificationFailed", "one or more acceptance criteria failed");
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Novikov-Shubin exponent and Brown-measure density of directed block models"};
  app.require_subcommand(1);
  Config cfg;

  auto input = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Matrix file {\"K\":..,\"S\"|\"P\":[[..]]}")->required()->check(CLI::ExistingFile);
  };
  auto out = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--out", cfg.out, "Output directory (created if missing)")
                    ->check(CLI::ExistingDirectory | CLI::NonexistentPath);
    if (required) opt->required();
  };

  auto* analyze = app.add_subcommand("analyze", "Support, irreducibility and normal form");
  input(analyze);
  out(analyze, false);
  auto* kappa = app.add_subcommand("kappa", "Exact kappa and Novikov-Shubin invariant");
  input(kappa);
  out(kappa, false);
  auto* density = app.add_subcommand("density", "Density sigma on a radial grid (CSV)");
  input(density);
  out(density, false);
  density->add_option("--radii", cfg.radii, "lo:hi:count[:log] or r1,r2,...");
  density->add_flag("--oracle", cfg.oracle, "Add the eta-integral density column");
  auto* exponents = app.add_subcommand("exponents", "Exponent profile and scaling slopes");
  input(exponents);
  out(exponents, true);
  exponents->add_option("--tau-min", cfg.tau_min, "Smallest tau")->check(CLI::PositiveNumber);
  exponents->add_option("--tau-max", cfg.tau_max, "Largest tau")->check(CLI::PositiveNumber);
  exponents->add_option("--tau-points", cfg.tau_points, "Number of log-spaced tau values")->check(CLI::Range(2, 10000));
  auto* simulate = app.add_subcommand("simulate", "Sample the block model and compare spectra");
  input(simulate);
  out(simulate, true);
  simulate->add_option("--n", cfg.n, "Batch size")->check(CLI::Range(1, dsbm::kMaxSpectrumSize));
  simulate->add_option("--seeds", cfg.seeds, "Number of trials")->check(CLI::Range(1, 10000));
  simulate->add_option("--seed", cfg.seed, "First seed");
  simulate->add_option("--radii", cfg.radii, "CDF grid lo:hi:count[:log] or t1,t2,...");
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_flag("--quick", cfg.quick, "Skip the Monte Carlo criterion");
  verify->add_option("--fixtures", cfg.fixtures, "Fixture directory")->check(CLI::ExistingDirectory);
  out(verify, false);

  try {
    app.parse(argc, argv);
    if (exponents->parsed() && !(cfg.tau_min < cfg.tau_max)) {
      throw CLI::ValidationError("--tau-min", "must be below --tau-max");
    }
    if (!cfg.radii.empty()) parse_radii(cfg.radii);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("Usage", e.what());
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(cfg);
    if (kappa->parsed()) return cmd_kappa(cfg);
    if (density->parsed()) return cmd_density(cfg);
    if (exponents->parsed()) return cmd_exponents(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
  } catch (const dsbm::Error& e) {
    print_error(e.code(), e.what(), error_extra(e));
    return kExitFailure;
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
