// eoagent command-line front end. Everything goes through the C API of
// libeoagent.
//
// Exit codes:
//   0  success
//   1  usage error (bad flags or arguments)
//   2  runtime error (unreadable input, invalid config, I/O failure, ...)
//   3  `run` finished but at least one workflow stage failed

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "eoagent/eoagent.h"
#include "json.hpp"

namespace {

constexpr int kExitRuntime = 2;
constexpr int kExitStageFailed = 3;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

int report_failure(eoa_status status) {
  std::fprintf(stderr, "error [%s]: %s\n", eoa_status_name(status), eoa_last_error());
  return kExitRuntime;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::string env_dataset_root() {
  const char* v = std::getenv("EOAGENT_DATASET_ROOT");
  return v ? v : "";
}

struct RunArgs {
  std::string manifest;
  std::string config;
  std::string modes;
  std::string out = "runs.jsonl";
  std::string dataset_root;
  std::optional<unsigned long long> seed;
};

int cmd_run(const RunArgs& a) {
  std::string config_json;
  if (!a.config.empty()) {
    auto text = read_file(a.config);
    if (!text) {
      std::fprintf(stderr, "error: cannot read config %s\n", a.config.c_str());
      return kExitRuntime;
    }
    config_json = *text;
  }
  if (a.seed) {
    nlohmann::json cfg = config_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(config_json, nullptr, false);
    if (cfg.is_discarded()) {
      std::fprintf(stderr, "error: config %s is not valid JSON\n", a.config.c_str());
      return kExitRuntime;
    }
    cfg["simnet"]["seed"] = *a.seed;
    config_json = cfg.dump();
  }
  const std::string root = a.dataset_root.empty() ? env_dataset_root() : a.dataset_root;

  eoa_workflow* wf = nullptr;
  eoa_status st = eoa_workflow_create(or_null(config_json), a.manifest.c_str(), or_null(root), &wf);
  if (st != EOA_OK) return report_failure(st);
  int records = 0;
  int failures = 0;
  st = eoa_workflow_run_dataset(wf, or_null(a.modes), a.out.c_str(), &records, &failures);
  eoa_workflow_free(wf);
  if (st != EOA_OK) return report_failure(st);
  std::printf("%d records written to %s (%d failed)\n", records, a.out.c_str(), failures);
  return failures > 0 ? kExitStageFailed : 0;
}

int cmd_report(const std::string& records, const std::string& method, const std::string& out_dir, bool json_out) {
  char* report_json = nullptr;
  char* text = nullptr;
  const eoa_status st = eoa_bench_report(records.c_str(), method.c_str(), or_null(out_dir), &report_json, &text);
  if (st != EOA_OK) return report_failure(st);
  std::fputs(json_out ? report_json : text, stdout);
  if (json_out) std::fputc('\n', stdout);
  if (!out_dir.empty()) std::printf("\nreport.json, report.txt and plot_data.csv written to %s\n", out_dir.c_str());
  eoa_string_free(report_json);
  eoa_string_free(text);
  return 0;
}

struct ServeArgs {
  std::string role;
  std::string node_id;
  std::string host = "127.0.0.1";
  int port = 0;
  std::string settings;
  std::string manifest;
  std::string dataset_root;
};

int cmd_serve(const ServeArgs& a) {
  std::string settings_json;
  if (!a.settings.empty()) {
    auto text = read_file(a.settings);
    if (!text) {
      std::fprintf(stderr, "error: cannot read settings %s\n", a.settings.c_str());
      return kExitRuntime;
    }
    settings_json = *text;
  }
  const nlohmann::json node{{"node_id", a.node_id.empty() ? a.role : a.node_id}, {"role", a.role}};
  const std::string root = a.dataset_root.empty() ? env_dataset_root() : a.dataset_root;

  eoa_node_server* server = nullptr;
  const eoa_status st = eoa_node_server_start(node.dump().c_str(), a.host.c_str(), a.port, or_null(settings_json),
                                              or_null(root), or_null(a.manifest), &server);
  if (st != EOA_OK) return report_failure(st);
  std::printf("%s node listening on http://%s:%d\n", a.role.c_str(), a.host.c_str(), eoa_node_server_port(server));
  std::fflush(stdout);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([server] {
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    eoa_node_server_stop(server);
  });
  eoa_node_server_wait(server);
  g_stop = true;
  watcher.join();
  eoa_node_server_free(server);
  return 0;
}

int cmd_synth(const std::string& preset, int count, unsigned long long seed, const std::string& out_dir) {
  char* manifest = nullptr;
  const eoa_status st = eoa_synth_dataset(preset.c_str(), count, seed, out_dir.c_str(), &manifest);
  if (st != EOA_OK) return report_failure(st);
  const auto entries = nlohmann::json::parse(manifest)["entries"].size();
  std::printf("%zu scenes written to %s\n", entries, out_dir.c_str());
  eoa_string_free(manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical multi-agent hazard detection: workflows, agent nodes and benchmark reports"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(eoa_version()));

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run every manifest scene under each workflow mode");
  run_cmd->add_option("-m,--manifest", run.manifest, "Dataset manifest.json")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-c,--config", run.config, "Workflow config JSON")->check(CLI::ExistingFile);
  run_cmd->add_option("--modes", run.modes, "Comma-separated modes (baseline,routed)");
  run_cmd->add_option("-o,--out", run.out, "JSON-lines output file")->capture_default_str();
  run_cmd->add_option("--dataset-root", run.dataset_root,
                      "Root for scene references (default: $EOAGENT_DATASET_ROOT, then the manifest directory)");
  run_cmd->add_option("--seed", run.seed, "Seed for the simulated network");

  std::string records;
  std::string method = "pearson";
  bool stats_json = false;
  auto* stats_cmd = app.add_subcommand("stats", "Print speed-up statistics for a run file");
  stats_cmd->add_option("records", records, "JSON-lines run records")->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--method", method, "Correlation method")
      ->check(CLI::IsMember({"pearson", "spearman"}))
      ->capture_default_str();
  stats_cmd->add_flag("--json", stats_json, "Print the report as JSON");

  std::string report_out = "report";
  auto* report_cmd = app.add_subcommand("report", "Write report.json, report.txt and plot_data.csv");
  report_cmd->add_option("records", records, "JSON-lines run records")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--method", method, "Correlation method")
      ->check(CLI::IsMember({"pearson", "spearman"}))
      ->capture_default_str();
  report_cmd->add_option("-o,--out", report_out, "Output directory")->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve one agent node over HTTP");
  serve_cmd->add_option("--role", serve.role, "Agent role")
      ->required()
      ->check(CLI::IsMember({"early_warning", "wildfire_specialist", "flood_specialist", "decision"}));
  serve_cmd->add_option("--node-id", serve.node_id, "Node id (default: the role)");
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port, 0 for an ephemeral one")->capture_default_str();
  serve_cmd->add_option("--settings", serve.settings, "Agent settings JSON")->check(CLI::ExistingFile);
  serve_cmd->add_option("--manifest", serve.manifest, "Dataset manifest.json")->check(CLI::ExistingFile);
  serve_cmd->add_option("--dataset-root", serve.dataset_root, "Root for scene references");

  std::string preset = "mixed";
  int count = 27;
  unsigned long long seed = 42;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset with a manifest");
  synth_cmd->add_option("--preset", preset, "mixed | two-regime | exemplars")
      ->check(CLI::IsMember({"mixed", "two-regime", "exemplars"}))
      ->capture_default_str();
  synth_cmd->add_option("-n,--count", count, "Number of scenes")->check(CLI::NonNegativeNumber)->capture_default_str();
  synth_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("-o,--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run_cmd) return cmd_run(run);
  if (*stats_cmd) return cmd_report(records, method, "", stats_json);
  if (*report_cmd) return cmd_report(records, method, report_out, false);
  if (*serve_cmd) return cmd_serve(serve);
  if (*synth_cmd) return cmd_synth(preset, count, seed, synth_out);
  return 1;
}
