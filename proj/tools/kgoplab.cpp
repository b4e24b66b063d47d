#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kgop/experiments.hpp"
#include "kgop/space.hpp"

// kgoplab <experiment> --config <path> --out <dir> [--override key=value]*
//
// exit codes: 0 pass, 2 config error (also unknown experiment / bad usage),
// 3 assertion failure, 4 non-convergence

namespace {

int do_validate(const std::string& config_path) {
  try {
    const kgop::exp::Config cfg =
        config_path.empty() ? kgop::exp::default_config() : kgop::exp::load_config(config_path);
    const kgop::exp::Validation v = kgop::exp::validate_config(cfg);
    if (v.ok) {
      std::printf("config ok\n");
      return 0;
    }
    for (const auto& viol : v.violations) std::printf("violation: %s\n", viol.c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

bool apply_overrides(kgop::exp::Config& cfg, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const std::size_t eq = ov.find('=');
    const std::size_t dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      std::fprintf(stderr, "error: override must look like section.key=value: %s\n", ov.c_str());
      return false;
    }
    cfg.set(ov.substr(0, dot), ov.substr(dot + 1, eq - dot - 1), ov.substr(eq + 1));
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgoplab: numerical experiments on weighted momentum-space operator families"};
  app.failure_message(CLI::FailureMessage::simple);

  std::string experiment;
  std::string config_path;
  std::string manifest_path;
  std::string out_dir = "kgoplab_out";
  std::vector<std::string> overrides;

  app.add_option("experiment", experiment,
                 "experiment name, or one of: list, validate, replay")
      ->required();
  app.add_option("--config", config_path, "config file (.cfg text or a .json manifest)");
  app.add_option("--manifest", manifest_path, "manifest to replay (replay mode)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--override", overrides, "section.key=value overrides")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (experiment == "list") {
    for (const std::string& name : kgop::exp::experiment_names()) std::printf("%s\n", name.c_str());
    return 0;
  }
  if (experiment == "validate") return do_validate(config_path);

  try {
    kgop::exp::ExperimentResult res;
    if (experiment == "replay") {
      if (manifest_path.empty()) {
        std::fprintf(stderr, "error: replay needs --manifest\n");
        return 2;
      }
      res = kgop::exp::run_from_manifest(manifest_path, out_dir);
    } else {
      kgop::exp::Config cfg =
          config_path.empty() ? kgop::exp::default_config() : kgop::exp::load_config(config_path);
      if (!apply_overrides(cfg, overrides)) return 2;
      res = kgop::exp::run_experiment(experiment, cfg, out_dir);
    }
    if (!res.message.empty()) std::printf("%s\n", res.message.c_str());
    for (const std::string& f : res.outputs) std::printf("wrote %s/%s\n", out_dir.c_str(), f.c_str());
    return static_cast<int>(res.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
