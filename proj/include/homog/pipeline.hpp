#pragma once

// Experiment records and the pipeline drivers behind the CLI.
//
// An experiment is a named, tagged computation with a default config; running
// one produces an ExperimentRecord: the canonical config and its hash, the
// artifact version, a JSON result payload, named assertions with bounds, and
// emitted CSV bodies.  Everything in the record except the wall-clock field
// is a pure function of (config, seed, version), and CSV bytes are emitted
// through fixed-format printf so repeated runs are byte-identical.
//
// Exit-code contract: 0 all assertions pass, 1 an assertion failed,
// 2 configuration or dispatch error.

#include <atomic>
#include <chrono>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "homog/config.hpp"

namespace homog {

inline constexpr const char* kArtifactVersion = "1.0.0";

// printf-style helper for deterministic numeric text.
inline std::string strprintf(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf);
}

struct AssertionResult {
  std::string name;
  double value{0.0};
  double bound{0.0};
  std::string relation;  // "<=", ">=", or "true"
  bool pass{false};
};

struct OutputFile {
  std::string name;   // relative file name, e.g. "tails.csv"
  std::string bytes;  // deterministic body
};

struct ExperimentRecord {
  std::string experiment;
  std::string name;
  std::string config_canonical;
  std::uint64_t config_hash{0};
  std::uint64_t seed{0};
  std::string artifact_version{kArtifactVersion};
  json results = json::object();
  std::vector<AssertionResult> assertions;
  bool pass{true};
  double wall_seconds{0.0};
  std::vector<OutputFile> files;

  void assert_le(const std::string& nm, double value, double bound) {
    AssertionResult a{nm, value, bound, "<=", value <= bound};
    pass = pass && a.pass;
    assertions.push_back(std::move(a));
  }
  void assert_ge(const std::string& nm, double value, double bound) {
    AssertionResult a{nm, value, bound, ">=", value >= bound};
    pass = pass && a.pass;
    assertions.push_back(std::move(a));
  }
  void assert_true(const std::string& nm, bool ok) {
    AssertionResult a{nm, ok ? 1.0 : 0.0, 1.0, "true", ok};
    pass = pass && a.pass;
    assertions.push_back(std::move(a));
  }
  void add_file(std::string nm, std::string bytes) {
    files.push_back(OutputFile{std::move(nm), std::move(bytes)});
  }

  // Hash of everything reproducible: canonical config, results payload,
  // assertion table, emitted file bytes.  Wall clock excluded.
  std::uint64_t payload_hash() const {
    std::string acc = config_canonical;
    acc += results.dump();
    for (const auto& a : assertions)
      acc += strprintf("|%s %s %.17g %.17g %d", a.name.c_str(), a.relation.c_str(), a.value,
                       a.bound, int(a.pass));
    for (const auto& f : files) {
      acc += "|" + f.name + "\n";
      acc += f.bytes;
    }
    return fnv1a64(acc);
  }
};

struct Experiment {
  std::string id;
  std::string summary;
  std::vector<std::string> tags;
  ExperimentConfig (*default_config)();
  void (*run)(const ExperimentConfig&, double tol_scale, ExperimentRecord&);

  bool has_tag(const std::string& t) const {
    for (const auto& tag : tags)
      if (tag == t) return true;
    return false;
  }
};

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

inline ExperimentRecord run_experiment(const Experiment& ex, const ExperimentConfig& cfg,
                                       double tol_scale = 1.0) {
  ExperimentRecord rec;
  rec.experiment = ex.id;
  rec.name = cfg.name;
  rec.seed = cfg.seed;
  rec.config_canonical = canonical_dump(cfg);
  rec.config_hash = fnv1a64(rec.config_canonical);
  const auto t0 = std::chrono::steady_clock::now();
  ex.run(cfg, tol_scale, rec);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

inline json record_to_json(const ExperimentRecord& rec, bool include_timing = true) {
  json j;
  j["experiment"] = rec.experiment;
  j["name"] = rec.name;
  j["config_hash"] = strprintf("%016llx", static_cast<unsigned long long>(rec.config_hash));
  j["payload_hash"] = strprintf("%016llx", static_cast<unsigned long long>(rec.payload_hash()));
  j["seed"] = rec.seed;
  j["artifact_version"] = rec.artifact_version;
  j["results"] = rec.results;
  json asserts = json::array();
  for (const auto& a : rec.assertions) {
    json ja;
    ja["name"] = a.name;
    ja["value"] = a.value;
    ja["bound"] = a.bound;
    ja["relation"] = a.relation;
    ja["pass"] = a.pass;
    asserts.push_back(std::move(ja));
  }
  j["assertions"] = std::move(asserts);
  j["pass"] = rec.pass;
  if (include_timing) j["wall_seconds"] = rec.wall_seconds;
  json files = json::array();
  for (const auto& f : rec.files) files.push_back(f.name);
  j["files"] = std::move(files);
  return j;
}

// Deterministic assertion table; the record's summary artifact.
inline std::string record_csv_summary(const ExperimentRecord& rec) {
  std::string out = "assertion,relation,value,bound,pass\n";
  for (const auto& a : rec.assertions)
    out += strprintf("%s,%s,%.12g,%.12g,%d\n", a.name.c_str(), a.relation.c_str(), a.value,
                     a.bound, int(a.pass));
  return out;
}

// ---------------------------------------------------------------------------
// Output directory layout:  <out>/<record name>/{record.json, config.json,
// summary.csv, <experiment files>}
// ---------------------------------------------------------------------------

inline std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("HOMOG_OUT"); env && *env) return env;
  return "homog-out";
}

inline void write_record(const ExperimentRecord& rec, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(out_dir) / rec.name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto put = [&](const std::string& nm, const std::string& bytes) {
    std::ofstream f(dir / nm, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (dir / nm).string());
    f.write(bytes.data(), std::streamsize(bytes.size()));
  };
  put("record.json", record_to_json(rec).dump(2) + "\n");
  put("config.json", rec.config_canonical);
  put("summary.csv", record_csv_summary(rec));
  for (const auto& f : rec.files) put(f.name, f.bytes);
}

// ---------------------------------------------------------------------------
// CLI backends.  All printing goes through FILE* so the CLI owns the streams.
// ---------------------------------------------------------------------------

inline const Experiment* find_experiment(const std::vector<Experiment>& registry,
                                         const std::string& id) {
  for (const auto& ex : registry)
    if (ex.id == id) return &ex;
  return nullptr;
}

inline int run_and_report(const Experiment& ex, const ExperimentConfig& cfg,
                          const std::string& out_dir, double tol_scale, FILE* out, FILE* err) {
  try {
    ExperimentRecord rec = run_experiment(ex, cfg, tol_scale);
    write_record(rec, out_dir);
    for (const auto& a : rec.assertions)
      std::fprintf(out, "  [%s] %s: %.6g %s %.6g\n", a.pass ? "pass" : "FAIL", a.name.c_str(),
                   a.value, a.relation.c_str(), a.bound);
    std::fprintf(out, "%s: %s (record: %s)\n", rec.name.c_str(), rec.pass ? "PASS" : "FAIL",
                 (std::filesystem::path(out_dir) / rec.name / "record.json").string().c_str());
    return rec.pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::fprintf(err, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(err, "error: %s\n", e.what());
    return 1;
  }
}

// `run <config.json>`: dispatch on the config's experiment field.
inline int cli_run(const std::vector<Experiment>& registry, const std::string& config_path,
                   const std::string& out_flag, double tol_scale, FILE* out = stdout,
                   FILE* err = stderr) {
  std::ifstream f(config_path, std::ios::binary);
  if (!f) {
    std::fprintf(err, "config error: cannot read %s\n", config_path.c_str());
    return 2;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  ExperimentConfig cfg;
  try {
    cfg = parse_config(ss.str());
  } catch (const ConfigError& e) {
    std::fprintf(err, "config error: %s\n", e.what());
    return 2;
  }
  const Experiment* ex = find_experiment(registry, cfg.experiment);
  if (!ex) {
    std::fprintf(err, "config error: config.experiment: unknown experiment '%s'\n",
                 cfg.experiment.c_str());
    return 2;
  }
  return run_and_report(*ex, cfg, resolve_out_dir(out_flag), tol_scale, out, err);
}

// `repro <name>`: run a registry experiment with its default config.
// `repro all` runs every experiment, optionally on several threads (records
// are independent; reporting stays in registry order).
inline int cli_repro(const std::vector<Experiment>& registry, const std::string& name,
                     const std::string& out_flag, double tol_scale, int threads = 1,
                     FILE* out = stdout, FILE* err = stderr) {
  const std::string out_dir = resolve_out_dir(out_flag);
  if (threads < 1) {
    std::fprintf(err, "config error: --threads must be >= 1\n");
    return 2;
  }
  if (name != "all") {
    const Experiment* ex = find_experiment(registry, name);
    if (!ex) {
      std::fprintf(err, "config error: unknown experiment '%s' (see `list`)\n", name.c_str());
      return 2;
    }
    return run_and_report(*ex, ex->default_config(), out_dir, tol_scale, out, err);
  }

  // repro all: run independently, report in registry order.
  struct Slot {
    int code{2};
    std::string text;
  };
  std::vector<Slot> slots(registry.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= registry.size()) return;
      char* buf = nullptr;
      std::size_t len = 0;
      FILE* mem = open_memstream(&buf, &len);
      slots[k].code = run_and_report(registry[k], registry[k].default_config(), out_dir,
                                     tol_scale, mem, mem);
      std::fclose(mem);
      slots[k].text.assign(buf, len);
      std::free(buf);
    }
  };
  const int nw = std::min<int>(threads, int(registry.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < nw; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int rc = 0;
  for (std::size_t k = 0; k < registry.size(); ++k) {
    std::fputs(slots[k].text.c_str(), slots[k].code == 2 ? err : out);
    rc = std::max(rc, slots[k].code);
  }
  return rc;
}

// `list [--tag t]`: registry table.  Unknown tags yield an empty table, exit 0.
inline int cli_list(const std::vector<Experiment>& registry, const std::string& tag = "",
                    FILE* out = stdout) {
  for (const auto& ex : registry) {
    if (!tag.empty() && !ex.has_tag(tag)) continue;
    std::string tags;
    for (const auto& t : ex.tags) tags += (tags.empty() ? "" : ",") + t;
    std::fprintf(out, "%-24s %-28s %s\n", ex.id.c_str(), tags.c_str(), ex.summary.c_str());
  }
  return 0;
}

}  // namespace homog
