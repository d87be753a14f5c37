// vprobe: ancilla-qubit spectroscopy of ultrastrong-coupling cavity vacua.
#include "vprobe/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Probe cavity-QED vacua through a weakly coupled ancilla qubit"};
  app.require_subcommand(1);

  vprobe::RunConfig run;
  std::string preset, config;
  int workers = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--preset", preset, "Named parameter set (fig2_dicke, fig4_tc, ...)");
    sub->add_option("--config", config, "JSON document overriding the preset")->check(CLI::ExistingFile);
    sub->add_option("--out", run.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", run.quiet, "Only report failures");
  };

  for (auto [name, help] : {std::pair{"levels", "Excitation energies and spectroscopic weights"},
                            std::pair{"lambshift", "Numeric and analytic ancilla Lamb shift, ground-state fidelity"},
                            std::pair{"spectroscopy", "Driven ancilla population and measurement fidelity"},
                            std::pair{"validate", "Truncation, symmetry and stability checks"}}) {
    add_common(app.add_subcommand(name, help));
  }

  app.add_flag_function(
      "--presets",
      [](std::int64_t) {
        for (const auto& [name, spec] : vprobe::figure_presets()) std::cout << name << '\n';
        std::exit(0);
      },
      "List preset names and exit");

  CLI11_PARSE(app, argc, argv);

  run.command = app.get_subcommands().front()->get_name();
  if (!preset.empty()) run.preset = preset;
  if (!config.empty()) run.config_path = config;
  if (workers > 0) run.workers = workers;
  return vprobe::run_command(run, std::cout, std::cerr);
}
