#ifndef STEKLOV_EXPERIMENT_HPP
#define STEKLOV_EXPERIMENT_HPP

// Command layer shared by the CLI and the tests: config schema, argument
// parsers and the experiment runners.

#include "steklov/curve.hpp"
#include "steklov/domain.hpp"
#include "steklov/functionals.hpp"
#include "steklov/trig.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace steklov::app {

using json = nlohmann::json;

std::string version();

struct ParamDef {
  std::string name;
  json default_value;
  std::string help;
  std::vector<std::string> aliases;
};

struct CommandDef {
  std::string name;
  std::string help;
  std::vector<ParamDef> params;
};

const std::vector<CommandDef>& commands();
const CommandDef& command(const std::string& name);

struct OutputSpec {
  std::string path;  // empty: standard output
  std::string format = "csv";
};

struct ExperimentConfig {
  std::string command;
  json parameters = json::object();
  OutputSpec output;
  std::uint64_t seed = 1;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Defaults, then `file` (JSON mirroring the flags), then `flags` (raw strings).
ExperimentConfig resolve(const std::string& command, const json& file, const std::vector<std::pair<std::string, std::string>>& flags);

/// Converts a raw flag string to the type of the parameter's default.
json coerce(const ParamDef& def, const std::string& raw);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

struct Result {
  Table table;
  json extra = json::object();
  std::vector<std::string> violations;  // invariant failures detected during the run
};

Result run(const ExperimentConfig& config);

/// Document with version, command, seed, full parameter echo and the table.
json to_document(const ExperimentConfig& config, const Result& r);
std::string to_csv(const ExperimentConfig& config, const Result& r);

// Parsers for the string forms used by flags and configs.
DomainSpec parse_domain(const std::string& s);
BoundaryWeight parse_weight(const std::string& s, const DomainSpec& domain, std::uint64_t seed);
std::function<double(double)> parse_curve_weight(const std::string& s, const DomainSpec& domain);
FunctionalSpec parse_functional(const std::string& s);
std::vector<double> parse_grid(const json& v);

}  // namespace steklov::app

#endif
