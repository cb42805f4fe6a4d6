#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjm/hamjac.hpp"
#include "hjm/schmidt.hpp"
#include "json.hpp"

namespace hjm {

/// Malformed or inconsistent job configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(ExitCode::usage, "config: " + msg) {}
};

enum class Method { ostrogradsky, schmidt2, schmidt3, schmidt2deg };

std::string method_name(Method m);
Method method_from_name(const std::string& s);

struct SimulationBlock {
  double t0 = 0.0;
  double t1 = 1.0;
  double h = 1e-3;
  std::map<std::string, double> initial;
  /// Momenta (and Schmidt auxiliaries) are read off the one-form instead of `initial`.
  bool lift = false;
};

struct SampleBlock {
  int points = 50;
  double lo = -1.0;
  double hi = 1.0;
  std::map<std::string, std::pair<double, double>> box;
  std::vector<std::string> domain;
};

struct Tolerances {
  double hj = 1e-8;
  double relatedness = 1e-5;
  double drift = 1e-8;
};

struct JobConfig {
  std::string problem;
  int n = 1;
  int k = 2;
  std::string lagrangian;
  Method method = Method::ostrogradsky;
  std::optional<std::string> gauge;
  std::optional<std::string> W;
  std::vector<std::string> gamma;
  std::map<std::string, double> params;
  std::optional<SimulationBlock> simulation;
  SampleBlock sample;
  Tolerances tolerances;
  /// Parameter values that should break a verified one-form.
  std::map<std::string, double> perturb;
  std::uint64_t seed = 0x5eedULL;

  /// Throws ConfigError on missing or mistyped fields.
  static JobConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

JobConfig load_config(const std::string& path);

/// Parses a config key such as "q1_0" or "mu"; ConfigError unless it names one symbol.
Symbol symbol_named(const std::string& name);

/// Constructed objects for a config.
struct Job {
  JobConfig config;
  LagrangianSpec L;
  std::optional<Expr> gauge;
  MorseFamily family;
  std::optional<Expr> hamiltonian;
  std::string equations;
  Binding params;
};

Job build_job(const JobConfig& cfg);

/// Parses expression text in the job's chart (acceleration names for the Schmidt methods).
Expr job_expr(const Job& job, const std::string& text);

/// One-form from W or the gamma components, with `overrides` substituted for parameters.
std::optional<ClosedOneForm> job_gamma(const Job& job, const std::map<std::string, double>& overrides = {});
SampleOptions job_sampling(const Job& job);

struct CommandResult {
  nlohmann::json report;
  std::string csv;
  int exit_code = 0;
};

/// Indented key/value rendering of a report.
std::string report_text(const nlohmann::json& report);

CommandResult cmd_derive(const JobConfig& cfg);
CommandResult cmd_simulate(const JobConfig& cfg);
CommandResult cmd_hjcheck(const JobConfig& cfg);
CommandResult cmd_solve_affine(const JobConfig& cfg);

struct Expectation {
  std::string check;
  bool pass = true;
  std::string tag;
  std::string note;
  nlohmann::json args = nlohmann::json::object();
};

struct CorpusEntry {
  std::string id;
  JobConfig config;
  std::vector<Expectation> expected;
};

/// Built-in examples, sorted by id.
const std::vector<CorpusEntry>& corpus();

struct CheckOutcome {
  bool pass = false;
  nlohmann::json detail;
};

/// Runs one named check against a job. Unknown names throw ConfigError.
CheckOutcome run_check(const Job& job, const Expectation& ex);

CommandResult cmd_corpus_list(const std::string& filter = "");
/// Entries whose id contains `filter` (all when no filter is given); an explicitly empty filter selects none.
CommandResult cmd_corpus_run(const std::optional<std::string>& filter = std::nullopt,
                             std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace hjm
