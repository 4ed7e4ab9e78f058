#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paro/experiments.hpp"

namespace {

// Leftover tokens are dotted-path config overrides: "--sweep.lambda [0.1,1]"
// or "--solver.max_iters=500". Values are parsed as JSON when possible and
// fall back to plain strings.
void apply_overrides(nlohmann::json& config, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0)
      throw std::invalid_argument("unrecognized argument '" + tok + "'");
    std::string key = tok.substr(2), value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size())
        throw std::invalid_argument("missing value for --" + key);
      value = extras[++i];
    }
    if (key.empty()) throw std::invalid_argument("empty override key");
    std::string pointer = "/" + key;
    for (char& c : pointer)
      if (c == '.') c = '/';
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
      parsed = value;
    }
    config[nlohmann::json::json_pointer(pointer)] = parsed;
  }
}

int run_subcommand(const std::string& name, const std::string& config_path,
                   const std::string& out_dir, const std::vector<std::string>& extras) {
  nlohmann::json config = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file " + config_path);
    config = nlohmann::json::parse(in);
    if (!config.is_object()) throw std::runtime_error("config root must be an object");
  }
  config["experiment"] = name;
  if (!out_dir.empty()) config["out_dir"] = out_dir;
  apply_overrides(config, extras);
  const std::vector<std::string> files = paro::run_experiment(config);
  for (const std::string& f : files) std::cout << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-affine regularized optimization bench"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  const std::map<std::string, std::string> subcommands = {
      {"quantsweep", "quantization-rate sweep over sample size and penalty weight"},
      {"solvers", "solver comparison traces on synthetic regression problems"},
      {"parcompare", "per-iteration quantized objective across penalty families"},
      {"statcompare", "estimation error of classic penalties vs their secant approximants"},
      {"prox-table", "closed-form vs brute-force proximal values on a grid"},
      {"solve", "single composite fit with trace and report"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, desc] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory (overrides config out_dir)");
    sub->allow_extras();
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    nlohmann::json err;
    err["error"] = std::string("argument parsing: ") + e.what();
    std::cerr << err.dump() << std::endl;
    return 2;
  }

  try {
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) return run_subcommand(name, config_path, out_dir, sub->remaining());
    }
    throw std::runtime_error("no subcommand selected");
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << std::endl;
    return 1;
  }
}
