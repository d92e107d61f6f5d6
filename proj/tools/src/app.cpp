#include "stc/cli/app.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "stc/cli/commands.hpp"
#include "stc/cli/spec.hpp"
#include "stc/trace_solver.hpp"

namespace stc::cli {

namespace {

using nlohmann::json;

struct Overrides {
  std::string config;
  std::optional<double> p, q, epsilon, dof_tolerance, decrease_tolerance, resolution, alpha;
  std::optional<int> max_inner_iterations;
  std::optional<double> gradient_tolerance, probe_tolerance, relaxation, fd_tolerance;
  std::optional<long long> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> run_id, output_root;
  std::vector<std::string> sets;
};

void add_common_flags(CLI::App& sub, Overrides& o) {
  sub.add_option("-c,--config", o.config, "JSON run description");
  sub.add_option("--p", o.p, "Sobolev exponent p (default 2)");
  sub.add_option("--q", o.q, "Trace exponent q (default 2)");
  sub.add_option("--epsilon", o.epsilon, "Gradient regularization (default 1e-8 for p < 2, else 0)");
  sub.add_option("--dof-tolerance", o.dof_tolerance, "Euler-Lagrange residual tolerance (default 1e-9)");
  sub.add_option("--decrease-tolerance", o.decrease_tolerance,
                 "Relative decrease tolerance over 5 iterations (default 1e-12)");
  sub.add_option("--max-inner-iterations", o.max_inner_iterations, "Descent iteration cap (default 200000)");
  sub.add_option("--gradient-tolerance", o.gradient_tolerance,
                 "Shape-gradient endpoint balance tolerance (default 0.02)");
  sub.add_option("--probe-tolerance", o.probe_tolerance,
                 "Relative decrease required by one-facet probes (default 1e-4)");
  sub.add_option("--relaxation", o.relaxation, "Hole penalty of the ranking problem, <= 0 = 1/max facet");
  sub.add_option("--tolerance", o.fd_tolerance, "verify-1d: relative tolerance vs the closed form (default 0.005)");
  sub.add_option("--resolution", o.resolution, "Mesh size (default 0.05)");
  sub.add_option("--alpha", o.alpha, "Hole fraction of the boundary measure");
  sub.add_option("--seed", o.seed, "Random seed (default 1)");
  sub.add_option("--workers", o.workers, "Worker threads, 0 = all cores");
  sub.add_option("--run-id", o.run_id, "Output directory name");
  sub.add_option("--output-root", o.output_root, "Output root (default $STC_OUTPUT_ROOT or results)");
  sub.add_option("--set", o.sets, "Override any field: /json/pointer=value (value parsed as JSON)")
      ->take_all();
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path, "cannot read config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

json assemble(const std::string& command, const Overrides& o) {
  json doc = o.config.empty() ? json::object() : read_config(o.config);
  if (!doc.is_object()) throw SpecError(o.config, "run description must be a JSON object");
  if (doc.contains("command") && doc.at("command") != command) {
    throw SpecError("/command", "config is for '" + doc.at("command").dump() + "', not '" + command + "'");
  }
  doc["command"] = command;
  auto put = [&doc](const char* pointer, const auto& value) {
    if (value) doc[json::json_pointer(pointer)] = *value;
  };
  put("/cfg/p", o.p);
  put("/cfg/q", o.q);
  put("/cfg/epsilon", o.epsilon);
  put("/cfg/dof_tolerance", o.dof_tolerance);
  put("/cfg/decrease_tolerance", o.decrease_tolerance);
  put("/cfg/max_inner_iterations", o.max_inner_iterations);
  put("/options/gradient_tolerance", o.gradient_tolerance);
  put("/options/probe_tolerance", o.probe_tolerance);
  put("/options/relaxation", o.relaxation);
  put("/options/tolerance", o.fd_tolerance);
  put("/resolution", o.resolution);
  put("/alpha", o.alpha);
  put("/seed", o.seed);
  put("/workers", o.workers);
  put("/run_id", o.run_id);
  put("/output_root", o.output_root);
  for (const std::string& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || s.empty() || s[0] != '/') {
      throw SpecError("--set", "expected /json/pointer=value, got '" + s + "'");
    }
    const std::string pointer = s.substr(0, eq);
    const std::string text = s.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    try {
      doc[json::json_pointer(pointer)] = value;
    } catch (const json::exception& e) {
      throw SpecError(pointer, e.what());
    }
  }
  return doc;
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal boundary holes for Sobolev trace constants"};
  app.require_subcommand(1);
  Overrides overrides;
  const std::vector<std::pair<std::string, std::string>> descriptions{
      {"solve", "Trace constant and extremal for a fixed hole"},
      {"optimize", "Optimal hole of measure alpha |boundary|"},
      {"shape-grad-check", "Shape derivative against central finite differences"},
      {"sweep-alpha", "Optimal constant over a grid of hole fractions"},
      {"sweep-mu", "Thin-domain scaling sweep"},
      {"verify-1d", "One-dimensional limit problem against its closed form"}};
  for (const auto& [name, text] : descriptions) add_common_flags(*app.add_subcommand(name, text), overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitConverged : kExitInvalid;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunSpec spec = parse_run_spec(assemble(command, overrides));
    const CommandOutcome outcome = run_command(spec, err);
    out << (outcome.directory / "summary.json").string() << '\n';
    if (outcome.exit_code == kExitNotConverged) err << "warning: not all solves converged\n";
    return outcome.exit_code;
  } catch (const SpecError& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const ConfigError& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const GeometryError& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const EmptyAdmissibleClass& e) {
    err << "invalid input: " << e.what() << '\n';
  }
  return kExitInvalid;
}

}  // namespace stc::cli
