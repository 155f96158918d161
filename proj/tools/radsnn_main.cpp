#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radsnn/cli_commands.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string profile;
  std::string theta_d;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--trials", f.trials, "number of independent trials");
  cmd->add_option("--theta-d", f.theta_d, "delay cap in ms, or 'inf'");
  cmd->add_option("--profile", f.profile,
                  "hyperparameter profile: synth, nmnist, dvsgesture, ntidigits");
}

radsnn::RunConfig resolve(const CommonFlags& f) {
  radsnn::RunConfig config =
      f.config_path.empty() ? radsnn::default_config() : radsnn::load_config(f.config_path);
  if (!f.profile.empty()) radsnn::apply_profile(config, f.profile);
  if (!f.theta_d.empty()) config.network.theta_d_ms = radsnn::parse_theta_d(f.theta_d);
  if (f.seed) config.seed = *f.seed;
  if (f.trials) config.trials = *f.trials;
  if (!f.out_dir.empty()) config.out_dir = f.out_dir;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiking-network trainer with per-neuron trainable axonal delays"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, ablate_flags, analyze_flags, gradcheck_flags,
      synth_flags;
  std::string eval_ckpt, analyze_ckpt, analyze_sample;
  std::vector<std::string> ablate_list;

  CLI::App* train_cmd = app.add_subcommand("train", "train networks and write reports");
  add_common(train_cmd, train_flags);

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the test data");
  add_common(eval_cmd, eval_flags);
  eval_cmd->add_option("checkpoint", eval_ckpt, "checkpoint file")->required();

  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "train one run-set per delay threshold");
  add_common(ablate_cmd, ablate_flags);
  ablate_cmd->add_option("--theta-d-list", ablate_list, "thresholds to sweep (numbers or inf)")
      ->delimiter(',');

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "cumulative-spike trace and decision time for a sample");
  add_common(analyze_cmd, analyze_flags);
  analyze_cmd->add_option("checkpoint", analyze_ckpt, "checkpoint file")->required();
  analyze_cmd->add_option("sample", analyze_sample, "event file (.rade or .csv)")->required();

  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "finite-difference verification of the gradients");
  add_common(gradcheck_cmd, gradcheck_flags);

  CLI::App* synth_cmd =
      app.add_subcommand("synth", "write the synthetic timing task as event files");
  add_common(synth_cmd, synth_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train_cmd->parsed()) return radsnn::cmd_train(resolve(train_flags));
    if (eval_cmd->parsed()) return radsnn::cmd_eval(resolve(eval_flags), eval_ckpt);
    if (ablate_cmd->parsed()) {
      radsnn::RunConfig config = resolve(ablate_flags);
      if (!ablate_list.empty()) {
        config.ablate_theta_d.clear();
        for (const std::string& token : ablate_list) {
          config.ablate_theta_d.push_back(radsnn::parse_theta_d(token));
        }
      }
      return radsnn::cmd_ablate(config);
    }
    if (analyze_cmd->parsed()) {
      return radsnn::cmd_analyze(resolve(analyze_flags), analyze_ckpt, analyze_sample);
    }
    if (gradcheck_cmd->parsed()) return radsnn::cmd_gradcheck(resolve(gradcheck_flags));
    if (synth_cmd->parsed()) return radsnn::cmd_synth(resolve(synth_flags));
  } catch (const radsnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
