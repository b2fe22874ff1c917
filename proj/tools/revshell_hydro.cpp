#include "revshell/config.hpp"
#include "revshell/errors.hpp"
#include "revshell/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

enum Exit { ok = 0, missing_input = 2, schema = 3, io = 4, numerical = 5 };

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw revshell::ValidationError("--n expects a comma list of integers, got '" + text + "'");
    out.push_back(n);
  }
  return out;
}

std::string output_dir(const revshell::RunConfig& config) {
  if (const char* env = std::getenv("REVSHELL_OUTPUT_DIR"); env && *env) return env;
  return config.output;
}

int fail(int code, const std::string& what) {
  std::cerr << "revshell-hydro: error: " << what << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hydroelastic analysis of partially filled compound shells of revolution"};
  app.require_subcommand(1);

  std::string config_path;
  std::string n_text = "8,16,32,64";
  bool dry = false, wet = false;

  auto* run = app.add_subcommand("run", "run the analysis class named in the config");
  run->add_option("config", config_path, "configuration file")->required();

  auto* converge = app.add_subcommand("converge", "boundary-solver convergence study");
  converge->add_option("config", config_path, "configuration file")->required();
  converge->add_option("--n", n_text, "comma separated ascending n values");

  auto* modes = app.add_subcommand("modes", "dry or wet natural frequencies");
  modes->add_option("config", config_path, "configuration file")->required();
  auto* dry_flag = modes->add_flag("--dry", dry, "dry modes");
  auto* wet_flag = modes->add_flag("--wet", wet, "wet modes");
  dry_flag->excludes(wet_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : missing_input;
  }

  try {
    const revshell::RunConfig config = revshell::parse_config(config_path);
    revshell::FileSet files;
    if (run->parsed()) {
      files = revshell::run(config);
    } else if (converge->parsed()) {
      files = revshell::convergence_files(revshell::convergence_study(config, parse_n_list(n_text)));
    } else {
      files = revshell::run_modes(config, wet);
    }
    files["config_resolved.cfg"] = revshell::echo_config(config);
    const std::string dir = output_dir(config);
    revshell::write_files(files, dir);
    for (const auto& [name, content] : files) std::cout << dir << "/" << name << "\n";
    return ok;
  } catch (const revshell::MissingInputError& e) {
    return fail(missing_input, e.what());
  } catch (const revshell::ValidationError& e) {
    return fail(schema, e.what());
  } catch (const revshell::IoError& e) {
    return fail(io, e.what());
  } catch (const revshell::NumericalError& e) {
    return fail(numerical, e.what());
  } catch (const revshell::DomainError& e) {
    return fail(numerical, e.what());
  } catch (const std::exception& e) {
    return fail(numerical, e.what());
  }
}
