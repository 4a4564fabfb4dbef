#pragma once

// Run configuration, report bundles, and deterministic serialization. A run
// is fully determined by one flat JSON config; bundles re-emit that config,
// every scenario result, one CSV per distribution, and a manifest whose
// content hash covers all emitted bytes. Float formatting is shortest
// round-trip, so identical configs produce byte-identical bundles.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmet/scenarios.hpp"

namespace qmet {

using json = nlohmann::json;

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericalError("format_double failed");
  return std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc()) throw ConfigError("cannot parse float '" + s + "'");
  return v;
}

// FNV-1a 64-bit content hash.
inline std::uint64_t fnv1a64(const std::string& bytes,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------------------
// configuration

struct RunConfig {
  std::string scenario = "all";
  int dim = 60;
  double hbar = 1.0;
  double mass = 1.0;
  double omega = 1.0;
  double alpha = 1.0;
  double l_x = 4.0;
  double l_p = 4.0;
  int grid_nx = 5;
  int grid_np = 5;
  int ancilla_dim = 0;
  int restarts = 6;
  int max_iters = 200;
  std::uint64_t optimizer_seed = 1;
  std::vector<double> step_schedule{0.5, 1.3, 0.5};  // initial, growth, shrink
  std::uint64_t seed = 7;
  std::string out_dir;
  std::vector<std::string> formats{"json", "csv"};

  RunSettings settings() const {
    RunSettings s;
    s.dim = dim;
    s.hbar = hbar;
    s.mass = mass;
    s.omega = omega;
    s.alpha = alpha;
    s.l_x = l_x;
    s.l_p = l_p;
    s.grid_nx = grid_nx;
    s.grid_np = grid_np;
    s.seed = seed;
    s.optimizer.ancilla_dim = ancilla_dim;
    s.optimizer.restarts = restarts;
    s.optimizer.max_iters = max_iters;
    s.optimizer.seed = optimizer_seed;
    if (step_schedule.size() != 3)
      throw ConfigError("optimizer.step_schedule expects 3 entries");
    s.optimizer.initial_step = step_schedule[0];
    s.optimizer.step_growth = step_schedule[1];
    s.optimizer.step_shrink = step_schedule[2];
    return s;
  }

  void validate() const {
    if (dim < 2) throw ConfigError("dim must be >= 2");
    if (hbar <= 0 || mass <= 0 || omega <= 0 || alpha <= 0)
      throw ConfigError("units block entries must be positive");
    if (l_x <= 0 || l_p <= 0) throw ConfigError("region sides must be positive");
    if (grid_nx < 1 || grid_np < 1) throw ConfigError("region grid too small");
    if (restarts < 1 || max_iters < 1)
      throw ConfigError("optimizer block entries must be positive");
    for (const auto& f : formats)
      if (f != "json" && f != "csv" && f != "plotdata")
        throw ConfigError("unknown output format '" + f + "'");
  }

  json to_json() const {
    json j;
    j["scenario"] = scenario;
    j["dim"] = dim;
    j["units"] = {{"hbar", hbar}, {"mass", mass}, {"omega", omega},
                  {"alpha", alpha}};
    j["region"] = {{"l_x", l_x}, {"l_p", l_p}, {"grid_nx", grid_nx},
                   {"grid_np", grid_np}};
    j["optimizer"] = {{"ancilla_dim", ancilla_dim},
                      {"restarts", restarts},
                      {"max_iters", max_iters},
                      {"seed", optimizer_seed},
                      {"step_schedule", step_schedule}};
    j["seed"] = seed;
    j["out"] = out_dir;
    j["formats"] = formats;
    return j;
  }

  static RunConfig from_json(const json& j) {
    RunConfig c;
    auto reject_unknown = [](const json& obj,
                             const std::vector<std::string>& keys,
                             const std::string& where) {
      for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const auto& k : keys) known = known || it.key() == k;
        if (!known)
          throw ConfigError("unknown key '" + it.key() + "' in " + where);
      }
    };
    reject_unknown(j,
                   {"scenario", "dim", "units", "region", "optimizer", "seed",
                    "out", "formats"},
                   "config");
    if (j.contains("scenario")) c.scenario = j.at("scenario").get<std::string>();
    if (j.contains("dim")) c.dim = j.at("dim").get<int>();
    if (j.contains("units")) {
      const json& u = j.at("units");
      reject_unknown(u, {"hbar", "mass", "omega", "alpha"}, "units");
      if (u.contains("hbar")) c.hbar = u.at("hbar").get<double>();
      if (u.contains("mass")) c.mass = u.at("mass").get<double>();
      if (u.contains("omega")) c.omega = u.at("omega").get<double>();
      if (u.contains("alpha")) c.alpha = u.at("alpha").get<double>();
    }
    if (j.contains("region")) {
      const json& r = j.at("region");
      reject_unknown(r, {"l_x", "l_p", "grid_nx", "grid_np"}, "region");
      if (r.contains("l_x")) c.l_x = r.at("l_x").get<double>();
      if (r.contains("l_p")) c.l_p = r.at("l_p").get<double>();
      if (r.contains("grid_nx")) c.grid_nx = r.at("grid_nx").get<int>();
      if (r.contains("grid_np")) c.grid_np = r.at("grid_np").get<int>();
    }
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      reject_unknown(
          o, {"ancilla_dim", "restarts", "max_iters", "seed", "step_schedule"},
          "optimizer");
      if (o.contains("ancilla_dim")) c.ancilla_dim = o.at("ancilla_dim").get<int>();
      if (o.contains("restarts")) c.restarts = o.at("restarts").get<int>();
      if (o.contains("max_iters")) c.max_iters = o.at("max_iters").get<int>();
      if (o.contains("seed")) c.optimizer_seed = o.at("seed").get<std::uint64_t>();
      if (o.contains("step_schedule"))
        c.step_schedule = o.at("step_schedule").get<std::vector<double>>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    if (j.contains("formats"))
      c.formats = j.at("formats").get<std::vector<std::string>>();
    c.validate();
    return c;
  }

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
  }
};

// ---------------------------------------------------------------------------
// bundles

struct ReportBundle {
  std::string directory;
  std::vector<std::string> files;  // relative names, emission order
  std::string content_hash;
};

inline json scenario_to_json(const ScenarioResult& r) {
  json out;
  out["id"] = r.id;
  out["quantities"] = json::array();
  for (const auto& q : r.quantities)
    out["quantities"].push_back({{"name", q.name},
                                 {"value", q.value},
                                 {"unit", q.unit},
                                 {"tolerance", q.tolerance},
                                 {"status", q.ok ? "ok" : "flagged"}});
  out["distributions"] = json::array();
  for (const auto& d : r.distributions)
    out["distributions"].push_back({{"name", d.name},
                                    {"support", d.dist.support},
                                    {"weights", d.dist.weights}});
  out["assertions"] = json::array();
  for (const auto& a : r.assertions)
    out["assertions"].push_back({{"claim_ref", a.claim_ref},
                                 {"status", a.pass ? "PASS" : "FAIL"},
                                 {"slack", a.slack}});
  out["notes"] = r.notes;
  return out;
}

inline std::string distribution_csv(const OutcomeDistribution& d) {
  std::ostringstream out;
  out << "value,probability\n";
  for (size_t k = 0; k < d.support.size(); ++k)
    out << format_double(d.support[k]) << ','
        << format_double(d.weights[k]) << '\n';
  return out.str();
}

inline ReportBundle write_bundle(const std::vector<ScenarioResult>& results,
                                 const RunConfig& config,
                                 const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  ReportBundle bundle;
  bundle.directory = dir;
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto emit = [&](const std::string& name, const std::string& bytes) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (fs::path(dir) / name).string());
    out << bytes;
    bundle.files.push_back(name);
    hash = fnv1a64(name, hash);
    hash = fnv1a64(bytes, hash);
  };
  const bool want_json =
      std::find(config.formats.begin(), config.formats.end(), "json") !=
      config.formats.end();
  const bool want_csv =
      std::find(config.formats.begin(), config.formats.end(), "csv") !=
          config.formats.end() ||
      std::find(config.formats.begin(), config.formats.end(), "plotdata") !=
          config.formats.end();
  json combined;
  combined["scenarios"] = json::array();
  for (const auto& r : results) {
    combined["scenarios"].push_back(scenario_to_json(r));
    if (want_csv)
      for (const auto& d : r.distributions)
        emit(r.id + "_" + d.name + ".csv", distribution_csv(d.dist));
  }
  if (want_json) emit("scenarios.json", combined.dump(2) + "\n");
  // manifest last: its hash covers every emitted byte
  json manifest;
  manifest["config"] = config.to_json();
  manifest["files"] = bundle.files;
  manifest["hash"] = "fnv1a64:" + hex64(hash);
  bundle.content_hash = manifest["hash"].get<std::string>();
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  out << manifest.dump(2) + "\n";
  bundle.files.push_back("manifest.json");
  return bundle;
}

inline std::vector<ScenarioResult> run_all_scenarios(const RunSettings& s) {
  std::vector<ScenarioResult> out;
  for (const auto& info : scenario_registry())
    out.push_back(run_scenario(info.id, s));
  return out;
}

}  // namespace qmet
