// mechtomo: run a workflow from a YAML config, or turn an artifact into plot data.
//
//   mechtomo tomography --config run.yaml --out results --seed 7 --threads 4
//   mechtomo plotdata results/wigner_reconstructed.txt > w.dat

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>

#include "mechtomo/cli.hpp"
#include "mechtomo/error.hpp"
#include "mechtomo/io.hpp"
#include "mechtomo/parallel.hpp"

namespace {

using namespace mechtomo;

struct RunFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

int run(const std::string& workflow, const RunFlags& flags) {
  cli::RunConfig cfg = flags.config.empty() ? cli::parse_config("", workflow) : cli::load_config(flags.config, workflow);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.threads) cfg.threads = *flags.threads;
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  set_thread_count(cfg.threads);

  cli::WorkflowResult result = cli::run_workflow(cfg);
  result.artifacts.insert(result.artifacts.begin(), {"resolved_config.yaml", cli::echo_config(cfg)});
  const auto manifest = cli::write_outputs(cfg.output_dir, result.artifacts, workflow);
  std::cout << result.summary;
  std::cout << "wrote " << result.artifacts.size() << " artifacts, manifest " << manifest.string() << "\n";
  return cli::kExitOk;
}

int plot(const std::string& artifact, const std::string& out) {
  std::string text;
  try {
    text = io::read_file(artifact);
  } catch (const std::exception& e) {
    throw cli::ConfigError("cannot read artifact '" + artifact + "': " + e.what());
  }
  const std::string data = cli::plotdata(text);
  if (out.empty()) {
    std::cout << data;
  } else {
    io::write_atomic(out, data);
  }
  return cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cantilever state tomography with a detector atom"};
  app.require_subcommand(1);

  std::vector<std::pair<std::string, RunFlags>> runs;
  runs.reserve(cli::workflows().size());
  for (const auto& name : cli::workflows()) runs.emplace_back(name, RunFlags{});
  for (auto& [name, flags] : runs) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " workflow");
    sub->add_option("--config", flags.config, "YAML config file; defaults apply when omitted");
    sub->add_option("--out", flags.out, "output directory (overrides output_dir)");
    sub->add_option("--seed", flags.seed, "RNG seed (overrides seed)");
    sub->add_option("--threads", flags.threads, "worker threads, 0 = auto (overrides threads)");
  }
  std::string artifact;
  std::string plot_out;
  CLI::App* plot_cmd = app.add_subcommand("plotdata", "emit gnuplot-ready text for an artifact");
  plot_cmd->add_option("artifact", artifact, "artifact file")->required();
  plot_cmd->add_option("--out", plot_out, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  try {
    if (plot_cmd->parsed()) return plot(artifact, plot_out);
    for (const auto& [name, flags] : runs) {
      if (app.got_subcommand(name)) return run(name, flags);
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kExitConfig;
  } catch (const ContractError& e) {
    std::string detail = e.what();
    if (detail.rfind(e.module() + ": ", 0) == 0) detail.erase(0, e.module().size() + 2);
    std::cerr << "contract violation in module " << e.module() << ": " << detail << "\n";
    return cli::kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitConfig;
  }
  return cli::kExitConfig;
}
