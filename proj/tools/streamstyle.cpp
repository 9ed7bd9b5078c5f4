// SPDX-License-Identifier: Apache-2.0
// streamstyle: batch renderer for scene configs.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "streamstyle/error.hpp"
#include "streamstyle/parallel.hpp"
#include "streamstyle/scene.hpp"

namespace {

namespace ss = streamstyle;

constexpr int kExitConfig = 2;
constexpr int kExitPipeline = 3;

void print_findings(const std::vector<ss::scene::Finding>& findings) {
  for (const auto& f : findings)
    std::cerr << "error: " << (f.pointer.empty() ? "<root>" : f.pointer) << ": " << f.message
              << '\n';
}

int cmd_render(const std::string& config, int threads, const std::string& output,
               std::optional<double> phase) {
  auto parsed = ss::scene::load_scene(config);
  if (!parsed.config) {
    print_findings(parsed.findings);
    return kExitConfig;
  }
  ss::scene::RunOptions opts;
  opts.threads = ss::resolve_threads(threads);
  if (!output.empty()) opts.output = output;
  opts.phase = phase;
  try {
    const auto report = ss::scene::run_scene(*parsed.config, opts);
    std::cerr << "lines=" << report.trace.lines << '\n'
              << "vertices=" << report.trace.vertices << '\n'
              << "seeds=" << report.trace.seeds << '\n'
              << "dropped=" << report.trace.dropped << '\n';
    for (const auto& [reason, n] : report.trace.drop_reasons)
      std::cerr << "dropped." << reason << '=' << n << '\n';
    std::cerr << "segments=" << report.raster.segments << '\n'
              << "fragments=" << report.raster.fragments << '\n'
              << "load_ms=" << report.timings.load_ms << '\n'
              << "trace_ms=" << report.timings.trace_ms << '\n'
              << "geometry_ms=" << report.timings.geometry_ms << '\n'
              << "raster_ms=" << report.timings.raster_ms << '\n'
              << "encode_ms=" << report.timings.encode_ms << '\n';
    std::cout << report.output.string() << '\n';
    return 0;
  } catch (const ss::LoadError& e) {
    std::cerr << "error: field: " << e.what() << '\n';
  } catch (const ss::TraceError& e) {
    std::cerr << "error: tracer: " << e.what() << '\n';
  } catch (const ss::StyleError& e) {
    std::cerr << "error: style: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitPipeline;
}

int cmd_validate(const std::string& config) {
  const auto parsed = ss::scene::load_scene(config);
  const nlohmann::json report = {{"config", config},
                                 {"valid", parsed.config.has_value()},
                                 {"findings", ss::scene::findings_to_json(parsed.findings)}};
  std::cout << report.dump(2) << '\n';
  return parsed.config ? 0 : kExitConfig;
}

int cmd_gen_field(const std::string& kind_name, const std::string& out,
                  const std::vector<int>& dims, const std::vector<std::string>& params) {
  ss::field::AnalyticKind kind;
  try {
    kind = ss::field::parse_analytic_kind(kind_name);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::map<std::string, double> values;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    char* end = nullptr;
    const double v = eq == std::string::npos ? 0.0 : std::strtod(p.c_str() + eq + 1, &end);
    if (eq == std::string::npos || end == p.c_str() + eq + 1 || *end != '\0') {
      std::cerr << "error: --param expects key=value, got '" << p << "'\n";
      return kExitConfig;
    }
    values[p.substr(0, eq)] = v;
  }
  try {
    const auto grid = ss::field::gen_analytic_field(kind, {dims[0], dims[1], dims[2]}, values);
    ss::field::save_grid(grid, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Illustrative streamline renderer"};
  app.require_subcommand(1);

  auto* render = app.add_subcommand("render", "Render a scene config to PNG");
  std::string config;
  int threads = 1;
  std::string output;
  std::optional<double> phase;
  render->add_option("config", config, "Scene config (JSON)")->required();
  render->add_option("--threads", threads, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  render->add_option("--output", output, "Override the output path");
  render->add_option("--phase", phase, "Override every pattern phase")->check(CLI::Range(0.0, 1.0));

  auto* validate = app.add_subcommand("validate", "Check a scene config without rendering");
  validate->add_option("config", config, "Scene config (JSON)")->required();

  auto* gen = app.add_subcommand("gen-field", "Write an analytic vector field as SFG");
  std::string kind;
  std::string out;
  std::vector<int> dims{32, 32, 32};
  std::vector<std::string> params;
  gen->add_option("kind", kind, "constant, circular, abc or cavity_like")->required();
  gen->add_option("out", out, "Output .sfg path")->required();
  gen->add_option("--dims", dims, "Grid nodes per axis")->delimiter(',')->expected(3);
  gen->add_option("--param", params, "Generator parameter key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (*render) return cmd_render(config, threads, output, phase);
  if (*validate) return cmd_validate(config);
  return cmd_gen_field(kind, out, dims, params);
}
