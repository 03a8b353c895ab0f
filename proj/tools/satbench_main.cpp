// satbench: experiment harness CLI.
//
//   satbench run --config cfg.json [--seed N] [--variant name] [--episodes N]
//                [--llm-endpoint URL] [--output DIR]
//   satbench compare manifest.json... [--output summary.json]
//   satbench export metrics.jsonl... [--output curves.tsv]

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "satnet/config.hpp"
#include "satnet/experiment.hpp"
#include "satnet/version.hpp"

using namespace satnet;

int main(int argc, char** argv) {
  CLI::App app{"UAV-satellite network MARL experiment harness"};
  app.set_version_flag("--version", std::string("satbench ") + kVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute one experiment run");
  std::string config_path;
  std::string variant_str;
  std::string llm_endpoint;
  std::string output_dir;
  long long seed = -1;
  int episodes = -1;
  run->add_option("--config", config_path, "Experiment config file (JSON)");
  run->add_option("--seed", seed, "Master seed override");
  run->add_option("--variant", variant_str,
                  "Variant override: llm_marl | recurrent_marl | acyclic_marl | greedy");
  run->add_option("--episodes", episodes, "Episode count override");
  run->add_option("--llm-endpoint", llm_endpoint,
                  "Live chat-completion endpoint URL; absence selects the stub");
  run->add_option("--output", output_dir, "Output directory override");

  auto* compare = app.add_subcommand("compare", "Compare run manifests");
  std::vector<std::string> manifest_paths;
  std::string compare_out;
  compare->add_option("manifests", manifest_paths, "Manifest files")->required();
  compare->add_option("--output", compare_out, "Write the summary as JSON");

  auto* exp = app.add_subcommand("export", "Export smoothed learning curves");
  std::vector<std::string> metrics_paths;
  std::string export_out = "curves.tsv";
  exp->add_option("metrics", metrics_paths, "Metrics logs (JSONL)")->required();
  exp->add_option("--output", export_out, "Output file (tab-separated)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      bench::ExperimentConfig config =
          config_path.empty() ? bench::config_from_json(nlohmann::json::object())
                              : bench::load_config_file(config_path);
      if (seed >= 0) config.seed = static_cast<uint64_t>(seed);
      if (episodes >= 0) config.episodes = episodes;
      if (!variant_str.empty()) {
        auto v = bench::parse_variant(variant_str);
        if (!v) {
          std::cerr << "unknown variant: " << variant_str << "\n";
          return 2;
        }
        config.variant = *v;
      }
      if (!output_dir.empty()) config.output_dir = output_dir;
      if (!llm_endpoint.empty()) {
        config.llm.mode = "live";
        config.llm.endpoint.base_url = llm_endpoint;
      }
      const bench::RunManifest manifest = bench::run_experiment(config);
      std::cout << "run complete: " << manifest.variant << " seed " << manifest.seed << "\n"
                << "  episodes:           " << manifest.episodes << "\n"
                << "  mean reward:        " << manifest.summary.mean_reward << "\n"
                << "  final-window mean:  " << manifest.summary.final_window_mean_reward << "\n"
                << "  metrics:            " << manifest.metrics_path << "\n";
      if (!manifest.checkpoint_path.empty())
        std::cout << "  checkpoint:         " << manifest.checkpoint_path << "\n";
      return 0;
    }

    if (compare->parsed()) {
      std::vector<bench::RunManifest> manifests;
      for (const auto& p : manifest_paths) manifests.push_back(bench::load_manifest(p));
      const bench::CompareSummary summary = bench::compare_variants(manifests);
      std::cout << summary.text;
      if (!compare_out.empty()) {
        std::ofstream f(compare_out, std::ios::trunc);
        f << summary.to_json().dump(2) << '\n';
      }
      return 0;
    }

    if (exp->parsed()) {
      bench::export_plot_data(metrics_paths, export_out);
      std::cout << "wrote " << export_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
