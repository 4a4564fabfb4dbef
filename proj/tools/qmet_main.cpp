// qmet command line: list scenarios, run one, verify everything, or emit the
// two sharp-measurement distributions as plot data.
//
// Exit codes: 0 success, 1 assertion failure, 2 configuration error,
// 3 numerical non-convergence.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qmet/report.hpp"

namespace {

qmet::RunConfig load_config(const std::string& config_path, int dim,
                            std::uint64_t seed, const std::string& out,
                            const std::string& formats) {
  qmet::RunConfig cfg;
  if (!config_path.empty()) cfg = qmet::RunConfig::from_file(config_path);
  if (dim > 0) cfg.dim = dim;
  if (seed != 0) cfg.seed = seed;
  if (!out.empty()) cfg.out_dir = out;
  if (!formats.empty()) {
    cfg.formats.clear();
    std::string cur;
    for (char ch : formats + ",") {
      if (ch == ',') {
        if (!cur.empty()) cfg.formats.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
  }
  cfg.validate();
  return cfg;
}

void print_result(const qmet::ScenarioResult& r) {
  std::printf("scenario %s\n", r.id.c_str());
  for (const auto& q : r.quantities)
    std::printf("  %-36s %-24s %s%s\n", q.name.c_str(),
                qmet::format_double(q.value).c_str(), q.unit.c_str(),
                q.ok ? "" : "  [flagged]");
  for (const auto& a : r.assertions)
    std::printf("  %-4s %-44s slack %s\n", a.pass ? "PASS" : "FAIL",
                a.claim_ref.c_str(), qmet::format_double(a.slack).c_str());
  for (const auto& n : r.notes) std::printf("  note: %s\n", n.c_str());
}

int finish(const std::vector<qmet::ScenarioResult>& results,
           const qmet::RunConfig& cfg) {
  if (!cfg.out_dir.empty()) {
    qmet::ReportBundle b = qmet::write_bundle(results, cfg, cfg.out_dir);
    std::printf("bundle: %s (%zu files, %s)\n", b.directory.c_str(),
                b.files.size(), b.content_hash.c_str());
  }
  bool all_pass = true;
  for (const auto& r : results) all_pass = all_pass && r.passed();
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"error/disturbance measurement toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, out_dir, formats, scenario_id;
  int dim = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--dim", dim, "truncation dimension override");
  app.add_option("--seed", seed, "seed override");
  app.add_option("--out", out_dir, "output bundle directory");
  app.add_option("--format", formats, "comma-separated subset of json,csv,plotdata");

  CLI::App* list_cmd = app.add_subcommand("list", "enumerate scenarios");
  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario");
  run_cmd->add_option("scenario", scenario_id, "scenario id")->required();
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the full invariant and sweep suite");
  CLI::App* fig_cmd = app.add_subcommand(
      "fig1", "emit the sharp-measurement pointer/position distributions as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    qmet::RunConfig cfg = load_config(config_path, dim, seed, out_dir, formats);
    if (list_cmd->parsed()) {
      for (const auto& info : qmet::scenario_registry()) {
        std::printf("%-18s %s\n", info.id.c_str(), info.description.c_str());
        std::printf("%-18s claims:", "");
        for (const auto& c : info.claim_refs) std::printf(" %s", c.c_str());
        std::printf("\n");
      }
      return 0;
    }
    if (run_cmd->parsed()) {
      qmet::ScenarioResult r = qmet::run_scenario(scenario_id, cfg.settings());
      print_result(r);
      return finish({r}, cfg);
    }
    if (verify_cmd->parsed()) {
      auto results = qmet::run_all_scenarios(cfg.settings());
      for (const auto& r : results) print_result(r);
      int failed = 0;
      for (const auto& r : results)
        for (const auto& a : r.assertions) failed += a.pass ? 0 : 1;
      std::printf("verify: %s (%d failing assertions)\n",
                  failed == 0 ? "PASS" : "FAIL", failed);
      return finish(results, cfg);
    }
    if (fig_cmd->parsed()) {
      qmet::ScenarioResult r = qmet::run_example7(cfg.settings());
      const std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
      qmet::RunConfig bundle_cfg = cfg;
      bundle_cfg.formats = {"csv"};
      qmet::ReportBundle b = qmet::write_bundle({r}, bundle_cfg, dir);
      for (const auto& f : b.files) std::printf("wrote %s/%s\n", dir.c_str(), f.c_str());
      return 0;
    }
  } catch (const qmet::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qmet::TruncationOverflow& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const qmet::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
