// Command line front-end: one experiment per invocation, CSV out.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "pointlike/pointlike.hpp"

namespace {

using namespace pointlike;

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::string out_path = "-";
  std::string save_config;
  std::map<std::string, std::string> flags;
};

void emit(const CsvTable& table, const ExperimentConfig& cfg, const std::string& path) {
  if (path == "-") {
    table.write(std::cout, cfg);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  table.write(out, cfg);
}

int run(const std::string& name, const ExperimentConfig& cfg, const std::string& out_path) {
  if (name == "potential") emit(run_potential(cfg), cfg, out_path);
  if (name == "converge") emit(run_converge(cfg), cfg, out_path);
  if (name == "spectrum") emit(run_spectrum(cfg), cfg, out_path);
  if (name == "chain") emit(run_chain(cfg), cfg, out_path);
  if (name == "duality") emit(run_duality(cfg), cfg, out_path);
  if (name == "evolve") {
    const bool want_profile = !cfg.text("evolve.profile_out").empty();
    CsvTable profile({});
    emit(run_evolve(cfg, want_profile ? &profile : nullptr), cfg, out_path);
    if (want_profile) emit(profile, cfg, cfg.text("evolve.profile_out"));
  }
  if (name == "selftest") {
    const auto results = run_selftest();
    emit(selftest_table(results), cfg, out_path);
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    std::cerr << results.size() - failed << "/" << results.size() << " properties pass\n";
    return failed == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-dependent pointlike interactions: experiments and checks"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);

  const std::pair<const char*, const char*> commands[] = {
      {"potential", "sample V_a, v_a and w_a of the regulated potential"},
      {"converge", "jump coefficient of the regulated problem versus range a"},
      {"spectrum", "ring eigenmodes of the pointlike model"},
      {"evolve", "capture probability p(t) on a ring or on the line"},
      {"chain", "chain of point interactions against the continuum problem"},
      {"duality", "boson to fermion mapping residuals"},
      {"selftest", "invariant suites of every module"},
  };
  std::map<std::string, Subcommand> subs;
  for (const auto& [name, help] : commands) {
    auto& s = subs[name];
    s.app = app.add_subcommand(name, help);
    s.app->add_option("--config", s.config_path, "key = value configuration file");
    s.app->add_option("--out", s.out_path, "output CSV path ('-' for stdout)");
    s.app->add_option("--save-config", s.save_config, "write the effective configuration to this path");
    for (const auto& k : config_schema()) {
      s.app->add_option("--" + k.key, s.flags[k.key], k.help + " [default " + k.default_value + "]");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    ExperimentConfig cfg;
    try {
      if (!s.config_path.empty()) cfg = ExperimentConfig::load(s.config_path);
      if (!cfg.command.empty() && cfg.command != name) {
        throw ConfigError("config file is for '" + cfg.command + "', not '" + name + "'");
      }
      cfg.command = name;
      for (const auto& k : config_schema()) {
        if (s.app->count("--" + k.key) > 0) cfg.set(k.key, s.flags[k.key]);
      }
      if (!s.save_config.empty()) {
        std::ofstream out(s.save_config);
        if (!out) throw ConfigError("cannot write " + s.save_config);
        out << cfg.to_text();
      }
      return run(name, cfg, s.out_path);
    } catch (const ConfigError& e) {
      std::cerr << e.name() << ": " << e.what() << '\n';
      return 2;
    } catch (const Error& e) {
      std::cerr << e.name() << ": " << e.what() << '\n';
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "InternalError: " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}
