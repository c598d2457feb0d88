#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmx/opnorm.hpp"
#include "lmx/space_io.hpp"

namespace lmx {

struct ExperimentConfig {
  std::string id = "thm1-u";  // thm1-u, thm1-v, thm2, remark1, remark2, prop1
  double p0 = 2, q0 = 1, r0 = 2;
  /// Prefix lengths n (thm1), levels l (thm2) or atom counts K (remark1).
  std::vector<long long> sweep;
  /// Exponents r to report (thm1, remark1); defaults depend on the experiment.
  std::vector<double> r_grid;
  std::uint64_t budget = 1u << 16;
  std::uint64_t seed = 1;
  /// Space files for prop1; empty means the built-in pair of first-type spaces.
  std::vector<std::string> component_files;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
  ExperimentConfig config;
  Table table;
  std::vector<Check> checks;
  Json sidecar;  // config, checks, trend fits and witnesses
  bool ok() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

ExperimentResult exp_theorem1(const ExperimentConfig& config);  // id thm1-u or thm1-v
ExperimentResult exp_theorem2(const ExperimentConfig& config);
ExperimentResult exp_remark1(const ExperimentConfig& config);
ExperimentResult exp_remark2(const ExperimentConfig& config);
ExperimentResult exp_prop1_sandwich(const ExperimentConfig& config);

/// Divergence case for the exponents: 1 or 2 for p0 > 1, 3 or 4 for p0 = q0 = 1.
Thm1Case theorem1_case(double p0, double q0, double r0, bool v_variant);

std::string to_csv(const Table& table);
Table table_from_csv(const std::string& text);
Json table_to_json(const Table& table);
Table table_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& j);
/// Table plus sidecar in one document (the --format json output).
Json result_to_json(const ExperimentResult& result);

/// Deterministic text form of a value: "%.12g" when it fits a double,
/// otherwise "2^<log2>".
std::string format_value(const ExtReal& x);
std::string format_double(double x);

/// Worker count from LMX_WORKERS, else the hardware concurrency.
unsigned worker_count();

}  // namespace lmx
