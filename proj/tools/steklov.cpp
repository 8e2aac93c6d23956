// steklov: command-line entry point for the experiments in src/experiment.cpp.

#include "experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

extern "C" void openblas_set_num_threads(int);

namespace {

enum Exit { ok = 0, failure = 1, schema = 2, violation = 3, io = 4 };

}  // namespace

int main(int argc, char** argv) {
  using namespace steklov::app;
  if (const char* t = std::getenv("STEKLOV_THREADS")) openblas_set_num_threads(std::max(1, std::atoi(t)));

  CLI::App cli{"Weighted Steklov eigenvalues: spectra, critical ellipses, optimization and degenerations"};
  cli.set_version_flag("--version", version());
  cli.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> raw;  // command → flag → value
  std::map<std::string, std::string> config_path;
  for (const auto& def : commands()) {
    CLI::App* sub = cli.add_subcommand(def.name, def.help);
    auto& flags = raw[def.name];
    for (const auto& p : def.params) {
      std::string names = "--" + p.name;
      for (const auto& a : p.aliases) names += ",--" + a;
      sub->add_option_function<std::string>(names, [&flags, key = p.name](const std::string& v) { flags[key] = v; },
                                             p.help + " (default " + p.default_value.dump() + ")");
    }
    sub->add_option_function<std::string>("--seed", [&flags](const std::string& v) { flags["seed"] = v; }, "seed for randomized starts");
    sub->add_option_function<std::string>("--output,-o", [&flags](const std::string& v) { flags["output"] = v; }, "output file (default stdout)");
    sub->add_option_function<std::string>("--format", [&flags](const std::string& v) { flags["format"] = v; }, "csv or json");
    sub->add_option("--config", config_path[def.name], "JSON config mirroring the flags");
  }
  CLI11_PARSE(cli, argc, argv);

  const std::string name = cli.get_subcommands().front()->get_name();
  try {
    json file;
    if (!config_path[name].empty()) {
      std::ifstream in(config_path[name]);
      if (!in) {
        std::cerr << "cannot read config " << config_path[name] << "\n";
        return io;
      }
      file = json::parse(in);
    }
    std::vector<std::pair<std::string, std::string>> flags(raw[name].begin(), raw[name].end());
    const ExperimentConfig cfg = resolve(name, file, flags);
    const Result r = run(cfg);
    const std::string text = cfg.output.format == "json" ? to_document(cfg, r).dump(2) + "\n" : to_csv(cfg, r);
    if (cfg.output.path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(cfg.output.path);
      if (!(out << text)) {
        std::cerr << "cannot write " << cfg.output.path << "\n";
        return io;
      }
    }
    for (const auto& v : r.violations) std::cerr << "invariant violated: " << v << "\n";
    return r.violations.empty() ? ok : violation;
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return schema;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return schema;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return schema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
}
