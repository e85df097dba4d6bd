#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metanets/ctm.hpp"
#include "metanets/engine.hpp"
#include "metanets/scenario.hpp"
#include "metanets/trace.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace metanets;

struct CliConfig {
  std::string scenario_path;
  std::string builtin;
  std::string model = "metanet_s";
  std::string out_dir;
  std::string exec = "auto";
  int threads = 0;
  std::int64_t horizon = -1;
  std::int64_t stride = 0;
  std::vector<std::string> overrides;
  std::vector<std::string> series;
};

std::string default_out_dir() {
  const char* env = std::getenv("METANETS_OUT");
  return env ? env : "out";
}

ParseResult load(const CliConfig& cfg) {
  std::string text;
  if (!cfg.builtin.empty()) {
    if (!is_builtin(cfg.builtin)) {
      std::string names;
      for (const auto& n : builtin_names()) names += " " + n;
      throw ScenarioError("unknown builtin '" + cfg.builtin + "'; available:" + names);
    }
    text = builtin_text(cfg.builtin);
  } else {
    std::ifstream in(cfg.scenario_path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file '" + cfg.scenario_path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
  }
  Document doc = parse_document(text);
  for (const auto& o : cfg.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos)
      throw ScenarioError("--set takes <entity>.<key>=<value>, got '" + o + "'");
    apply_override(doc, o.substr(0, eq), o.substr(eq + 1));
  }
  return build_spec(doc);
}

int run_model(const NetworkSpec& spec, Model model, const CliConfig& cfg) {
  const std::string tag = model == Model::metanet_s ? "metanet_s" : "ctm_s";

  std::string trace;
  CsvTraceWriter writer(&trace);
  std::vector<std::string> series = cfg.series;
  if (series.empty()) series = spec.default_series;

  const CompiledNetwork net = compile(spec);
  std::vector<std::unique_ptr<SeriesProbe>> probes;
  for (const auto& q : series) {
    if (model == Model::ctm_s && q.rfind("v_", 0) == 0) continue;  // no speed in the baseline
    probes.push_back(std::make_unique<SeriesProbe>(net, q));
  }

  RunOptions opt;
  opt.stride = cfg.stride;
  opt.horizon_override = cfg.horizon;
  if (cfg.exec == "serial") opt.sim.exec = Exec::serial;
  if (cfg.exec == "parallel") opt.sim.exec = Exec::parallel;
  opt.sinks.push_back(&writer);
  for (auto& p : probes) opt.sinks.push_back(p.get());

  const RunSummary summary = run(spec, model, opt);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  write_text_file((fs::path(cfg.out_dir) / ("trace_" + tag + ".csv")).string(), trace);
  write_text_file((fs::path(cfg.out_dir) / ("summary_" + tag + ".txt")).string(),
                  format_summary(summary));
  for (const auto& p : probes)
    write_series_file(
        (fs::path(cfg.out_dir) / (p->quantity() + "_" + tag + ".dat")).string(), *p);

  std::printf("%s: %lld steps, residual %.3g veh, outputs in %s/\n", tag.c_str(),
              static_cast<long long>(summary.steps), summary.residual, cfg.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"macroscopic freeway simulator with service-station dynamics"};
  app.require_subcommand(1);

  CliConfig cfg;
  cfg.out_dir = default_out_dir();

  auto add_input = [&](CLI::App* cmd) {
    auto* s = cmd->add_option("--scenario", cfg.scenario_path, "scenario file");
    auto* b = cmd->add_option("--builtin", cfg.builtin, "builtin scenario name");
    s->excludes(b);
    b->excludes(s);
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run a scenario and write traces");
  add_input(run_cmd);
  run_cmd->add_option("--model", cfg.model, "metanet_s, ctm_s or both")
      ->check(CLI::IsMember({"metanet_s", "ctm_s", "both"}));
  run_cmd->add_option("--out", cfg.out_dir, "output directory (default $METANETS_OUT or ./out)");
  run_cmd->add_option("--horizon", cfg.horizon, "override the number of steps");
  run_cmd->add_option("--stride", cfg.stride, "record every N-th step")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--set", cfg.overrides, "override <entity>.<key>=<value>")
      ->take_all();
  run_cmd->add_option("--series", cfg.series, "quantities to emit as two-column files")
      ->take_all();
  run_cmd->add_option("--exec", cfg.exec, "kernel execution: auto, serial or parallel")
      ->check(CLI::IsMember({"auto", "serial", "parallel"}));
  run_cmd->add_option("--threads", cfg.threads, "OpenMP thread count (0 = default)");

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a scenario and print the report");
  add_input(validate_cmd);

  CLI::App* show_cmd = app.add_subcommand("show", "print the canonical form of a scenario");
  add_input(show_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cfg.builtin.empty() && cfg.scenario_path.empty())
      throw ScenarioError("a scenario is required: --scenario <file> or --builtin <name>");

    if (show_cmd->parsed()) {
      const ParseResult parsed = load(cfg);
      std::fputs(serialize(parsed.spec).c_str(), stdout);
      return 0;
    }

    const ParseResult parsed = load(cfg);
    for (const auto& w : parsed.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    const ValidationReport report = validate(parsed.spec);

    if (validate_cmd->parsed()) {
      std::fputs(format_report(report).c_str(), stdout);
      return report.ok() ? 0 : 2;
    }

    if (!report.ok()) {
      std::fputs(format_report(report).c_str(), stderr);
      return 2;
    }

#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif

    if (cfg.model == "metanet_s" || cfg.model == "both")
      run_model(parsed.spec, Model::metanet_s, cfg);
    if (cfg.model == "ctm_s" || cfg.model == "both")
      run_model(parsed.spec, Model::ctm_s, cfg);
    return 0;
  } catch (const ScenarioError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
