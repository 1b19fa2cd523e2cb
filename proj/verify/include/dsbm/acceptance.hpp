#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dsbm/profile.hpp"
#include "dsbm/rational.hpp"
#include "dsbm/structure.hpp"

namespace dsbm::acceptance {

struct Fixture {
  std::string name;
  VarianceProfile profile;
  Rational kappa;
  Rational c_ns;
  int blocks = 0;
  double sigma_slope = 0.0;
  double slope_tolerance = 0.05;
};

Fixture load_fixture(const std::filesystem::path& path);
// Every *.json under dir, keyed by fixture name.
std::map<std::string, Fixture> load_fixtures(const std::filesystem::path& dir);

// Independent brute-force oracles for small K.
bool oracle_fully_indecomposable(const ZeroPattern& z);  // zero-block enumeration
bool oracle_irreducible(const ZeroPattern& z);           // transitive closure
bool oracle_has_support(const ZeroPattern& z);           // all permutations
bool valid_witness(const ZeroPattern& z, const SupportWitness& w);

// Random K x K pattern with the given density of positive entries, values in [0.1, 2].
VarianceProfile random_profile(std::mt19937_64& rng, int k, double density);
// Rejection-sampled until irreducible with support.
VarianceProfile random_admissible_profile(std::mt19937_64& rng, int k);

struct CriterionResult {
  std::string id;
  std::string name;
  enum class Status { Pass, Fail, Skip } status = Status::Fail;
  std::string detail;
  double seconds = 0.0;

  bool ok() const { return status != Status::Fail; }
  std::string line() const;  // "[PASS] AC1 name: detail (0.001 s)"
};

struct SuiteOptions {
  std::filesystem::path fixture_dir;
  bool quick = false;  // skip the Monte Carlo criterion
  std::optional<std::vector<std::string>> only;  // criterion ids to run
};

CriterionResult ac1_golden_kappa(const std::map<std::string, Fixture>& fixtures);
CriterionResult ac2_kappa_oracle();
CriterionResult ac3_circular_law();
CriterionResult ac4_density_cross_validation(const std::map<std::string, Fixture>& fixtures);
CriterionResult ac5_density_exponent(const std::map<std::string, Fixture>& fixtures);
CriterionResult ac6_scaling_slopes(const std::map<std::string, Fixture>& fixtures);
CriterionResult ac7_structure_suite(const std::map<std::string, Fixture>& fixtures);
CriterionResult ac8_variational(const std::map<std::string, Fixture>& fixtures);
CriterionResult ac9_monte_carlo(const std::map<std::string, Fixture>& fixtures);
CriterionResult ac10_structural_invariants();

// Runs the criteria in order, calling `report` after each one.
std::vector<CriterionResult> run_suite(
    const SuiteOptions& options, const std::function<void(const CriterionResult&)>& report = {});

}  // namespace dsbm::acceptance
