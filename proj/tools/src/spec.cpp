#include "stc/cli/spec.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace stc::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kTopLevel{"command", "domain", "resolution", "cfg",     "alpha",       "hole",
                                      "seed",    "workers", "run_id",    "options", "output_root"};

double number_at(const json& obj, const std::string& key, double fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw SpecError(path + "/" + key, "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

long long integer_at(const json& obj, const std::string& key, long long fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw SpecError(path + "/" + key, "expected an integer");
  return v.get<long long>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw SpecError(path + "/" + key, "unknown field");
  }
}

Domain parse_domain(const json& d) {
  if (!d.is_object()) throw SpecError("/domain", "expected an object");
  if (!d.contains("kind") || !d.at("kind").is_string()) throw SpecError("/domain/kind", "missing domain kind");
  const std::string kind = d.at("kind").get<std::string>();
  Domain out;
  if (kind == "disk") {
    reject_unknown(d, {"kind", "radius"}, "/domain");
    out = Disk{number_at(d, "radius", 1.0, "/domain")};
  } else if (kind == "rectangle") {
    reject_unknown(d, {"kind", "width", "height"}, "/domain");
    out = Rectangle{number_at(d, "width", 1.0, "/domain"), number_at(d, "height", 1.0, "/domain")};
  } else if (kind == "interval") {
    reject_unknown(d, {"kind", "a", "b"}, "/domain");
    out = Interval{number_at(d, "a", 0.0, "/domain"), number_at(d, "b", 1.0, "/domain")};
  } else if (kind == "thin_rectangle") {
    reject_unknown(d, {"kind", "a", "b", "mu"}, "/domain");
    out = ThinRectangle{number_at(d, "a", 0.0, "/domain"), number_at(d, "b", 1.0, "/domain"),
                        number_at(d, "mu", 0.1, "/domain")};
  } else {
    throw SpecError("/domain/kind", "unknown domain kind '" + kind +
                                        "' (expected disk, rectangle, interval or thin_rectangle)");
  }
  try {
    validate(out);
  } catch (const GeometryError& e) {
    throw SpecError("/domain", e.what());
  }
  return out;
}

ProblemConfig parse_cfg(const json& c) {
  if (!c.is_object()) throw SpecError("/cfg", "expected an object");
  reject_unknown(c, {"p", "q", "epsilon", "dof_tolerance", "decrease_tolerance", "max_inner_iterations"}, "/cfg");
  ProblemConfig cfg;
  cfg.p = number_at(c, "p", cfg.p, "/cfg");
  cfg.q = number_at(c, "q", cfg.q, "/cfg");
  cfg.epsilon = number_at(c, "epsilon", cfg.epsilon, "/cfg");
  cfg.dof_tolerance = number_at(c, "dof_tolerance", cfg.dof_tolerance, "/cfg");
  cfg.decrease_tolerance = number_at(c, "decrease_tolerance", cfg.decrease_tolerance, "/cfg");
  cfg.max_inner_iterations =
      static_cast<int>(integer_at(c, "max_inner_iterations", cfg.max_inner_iterations, "/cfg"));
  return cfg;
}

const json* option_value(const RunSpec& spec, const std::string& key) {
  return spec.options.contains(key) ? &spec.options.at(key) : nullptr;
}

}  // namespace

std::filesystem::path default_output_root() {
  const char* env = std::getenv("STC_OUTPUT_ROOT");
  return (env && *env) ? std::filesystem::path(env) : std::filesystem::path("results");
}

json parse_config_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw SpecError(origin, "malformed JSON at line " + std::to_string(line) + ", column " +
                                std::to_string(column) + ": " + e.what());
  }
}

RunSpec parse_run_spec(const json& doc) {
  if (!doc.is_object()) throw SpecError("/", "run description must be a JSON object");
  reject_unknown(doc, kTopLevel, "");
  RunSpec spec;
  if (!doc.contains("command") || !doc.at("command").is_string()) throw SpecError("/command", "missing command");
  spec.command = doc.at("command").get<std::string>();
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), spec.command) == names.end()) {
    throw SpecError("/command", "unknown command '" + spec.command + "'");
  }
  if (doc.contains("domain")) spec.domain = parse_domain(doc.at("domain"));
  spec.resolution = number_at(doc, "resolution", spec.resolution, "");
  if (!(spec.resolution > 0.0)) throw SpecError("/resolution", "must be positive");
  if (doc.contains("cfg")) spec.cfg = parse_cfg(doc.at("cfg"));
  // verify-1d and sweep-mu build their own interval and thin-strip problems.
  const int dim = spec.command == "verify-1d" ? 1 : spec.command == "sweep-mu" ? 2 : dimension(spec.domain);
  try {
    validate(spec.cfg, dim);
  } catch (const ConfigError& e) {
    throw SpecError("/cfg", e.what());
  }
  if (doc.contains("alpha")) {
    spec.alpha = number_at(doc, "alpha", 0.0, "");
    if (!(*spec.alpha > 0.0 && *spec.alpha < 1.0)) throw SpecError("/alpha", "must lie in (0,1)");
  }
  if (doc.contains("hole")) {
    const json& h = doc.at("hole");
    if (!h.is_array()) throw SpecError("/hole", "expected an array of [start, length] pairs");
    for (std::size_t i = 0; i < h.size(); ++i) {
      const json& arc = h[i];
      if (!arc.is_array() || arc.size() != 2 || !arc[0].is_number() || !arc[1].is_number()) {
        throw SpecError("/hole/" + std::to_string(i), "expected [start, length]");
      }
      const double length = arc[1].get<double>();
      if (!(length > 0.0)) throw SpecError("/hole/" + std::to_string(i), "arc length must be positive");
      spec.hole.emplace_back(arc[0].get<double>(), length);
    }
  }
  if (spec.alpha && !spec.hole.empty()) throw SpecError("/hole", "give either alpha or hole, not both");
  const long long seed = integer_at(doc, "seed", 1, "");
  if (seed < 0) throw SpecError("/seed", "must be nonnegative");
  spec.seed = static_cast<std::uint64_t>(seed);
  const long long workers = integer_at(doc, "workers", 0, "");
  if (workers < 0) throw SpecError("/workers", "must be nonnegative");
  spec.workers = static_cast<unsigned>(workers);
  if (doc.contains("options")) {
    if (!doc.at("options").is_object()) throw SpecError("/options", "expected an object");
    spec.options = doc.at("options");
  }
  if (doc.contains("run_id")) {
    if (!doc.at("run_id").is_string() || doc.at("run_id").get<std::string>().empty()) {
      throw SpecError("/run_id", "expected a non-empty string");
    }
    spec.run_id = doc.at("run_id").get<std::string>();
    if (spec.run_id.find('/') != std::string::npos || spec.run_id == "." || spec.run_id == "..") {
      throw SpecError("/run_id", "must be a plain directory name");
    }
  } else {
    spec.run_id = default_run_id(doc);
  }
  if (doc.contains("output_root")) {
    if (!doc.at("output_root").is_string()) throw SpecError("/output_root", "expected a string");
    spec.output_root = doc.at("output_root").get<std::string>();
  } else {
    spec.output_root = default_output_root();
  }
  spec.source = doc;
  spec.source.erase("output_root");
  return spec;
}

std::string default_run_id(const json& doc) {
  json normalized = doc;
  normalized.erase("output_root");
  normalized.erase("run_id");
  // FNV-1a over the canonical dump; json objects are key-sorted.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : normalized.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  const std::string command = doc.value("command", std::string("run"));
  return command + "-" + std::string(hex).substr(0, 10);
}

double option_number(const RunSpec& spec, const std::string& key, double fallback) {
  const json* v = option_value(spec, key);
  if (!v) return fallback;
  if (!v->is_number()) throw SpecError("/options/" + key, "expected a number");
  return v->get<double>();
}

int option_int(const RunSpec& spec, const std::string& key, int fallback) {
  const json* v = option_value(spec, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw SpecError("/options/" + key, "expected an integer");
  return v->get<int>();
}

std::string option_string(const RunSpec& spec, const std::string& key, const std::string& fallback) {
  const json* v = option_value(spec, key);
  if (!v) return fallback;
  if (!v->is_string()) throw SpecError("/options/" + key, "expected a string");
  return v->get<std::string>();
}

std::vector<double> option_numbers(const RunSpec& spec, const std::string& key, std::vector<double> fallback) {
  const json* v = option_value(spec, key);
  if (!v) return fallback;
  if (!v->is_array()) throw SpecError("/options/" + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : *v) {
    if (!x.is_number()) throw SpecError("/options/" + key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

bool option_bool(const RunSpec& spec, const std::string& key, bool fallback) {
  const json* v = option_value(spec, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw SpecError("/options/" + key, "expected true or false");
  return v->get<bool>();
}

}  // namespace stc::cli
