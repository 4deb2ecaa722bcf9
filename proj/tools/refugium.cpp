#include "refugium/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace refugium;

  CLI::App app{"Predator-prey steady states with a protection zone"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  int threads = 1;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"thresholds", "Critical prey growth rates and the predicted regime"},
      {"steady", "Steady state by time march and Newton"},
      {"sweep", "Branch of steady states over a theta grid"},
      {"zones", "theta_star against protection-zone size"},
      {"asymptotic", "Convergence as the predator growth rate grows"},
      {"verify", "Run the acceptance suite"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* opt = sub->add_option("--config", config_path, "Config file");
    if (name != "verify") opt->required();
    sub->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  CommandContext ctx;
  ctx.threads = threads;
  ctx.console = &std::cout;
  try {
    if (!config_path.empty()) ctx.config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  ctx.out_dir = out_dir.empty() ? ctx.config.output_dir : out_dir;
  return run_command(app.get_subcommands().front()->get_name(), ctx);
}
