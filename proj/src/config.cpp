#include "aoisim/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "aoisim/version.hpp"

namespace aoisim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string text(value);
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + std::string(key) + "': cannot parse number '" +
                      std::string(value) + "'");
  }
}

std::int64_t parse_int(std::string_view key, std::string_view value) {
  std::int64_t v = 0;
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + std::string(key) + "': cannot parse integer '" +
                      std::string(value) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + std::string(key) + "': cannot parse integer '" +
                      std::string(value) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + std::string(key) + "': expected true/false, got '" +
                    std::string(value) + "'");
}

std::vector<double> parse_double_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    if (comma == std::string_view::npos) comma = value.size();
    const std::string_view item = trim(value.substr(start, comma - start));
    if (!item.empty()) out.push_back(parse_double(key, item));
    start = comma + 1;
    if (comma == value.size()) break;
  }
  if (out.empty()) throw ConfigError("key '" + std::string(key) + "': empty list");
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

const char* tail_name(SpacingRule::Tail tail) {
  switch (tail) {
    case SpacingRule::Tail::Constant: return "constant";
    case SpacingRule::Tail::Arithmetic: return "arithmetic";
    case SpacingRule::Tail::Geometric: return "geometric";
  }
  return "?";
}

SpacingRule::Tail tail_from_string(std::string_view name) {
  if (name == "constant") return SpacingRule::Tail::Constant;
  if (name == "arithmetic") return SpacingRule::Tail::Arithmetic;
  if (name == "geometric") return SpacingRule::Tail::Geometric;
  throw ConfigError("unknown spacing_tail '" + std::string(name) + "'");
}

}  // namespace

SimConfig make_cell(const ExperimentConfig& experiment, PolicyKind kind, double p,
                    std::optional<double> t0) {
  SimConfig cell;
  cell.lambda = experiment.lambda;
  cell.p = p;
  cell.horizon = experiment.horizon;
  cell.initial_energy = experiment.initial_energy;
  cell.policy.kind = kind;
  cell.policy.t0 = t0;
  if (kind == PolicyKind::ConstantRenewal) cell.policy.spacings = experiment.spacings;
  cell.feedback = experiment.feedback.value_or(required_feedback(kind));
  cell.n_paths = experiment.n_paths;
  cell.seed = experiment.seed;
  cell.checkpoints = experiment.checkpoints;
  cell.record_trace = experiment.record_trace;
  return cell;
}

std::vector<SimConfig> ExperimentConfig::expand() const {
  if (policies.empty()) throw ConfigError("key 'policy': at least one policy is required");
  if (p_values.empty()) throw ConfigError("key 'p': at least one value is required");
  std::vector<SimConfig> cells;
  for (PolicyKind kind : policies) {
    const bool er = is_energy_removal(kind);
    if (er && t0_values.empty()) {
      throw ConfigError(std::string("key 't0': required for policy '") + to_string(kind) + "'");
    }
    for (double p : p_values) {
      const auto push_cell = [&](std::optional<double> t0) {
        SimConfig cell = make_cell(*this, kind, p, t0);
        try {
          cell.validate();
        } catch (const ConfigError& e) {
          throw ConfigError("cell " + cell_label(cell) + ": " + e.what());
        }
        cells.push_back(std::move(cell));
      };
      if (er) {
        for (double t0 : t0_values) push_cell(t0);
      } else {
        push_cell(std::nullopt);
      }
    }
  }
  return cells;
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  cfg.policies.clear();
  cfg.p_values.clear();

  std::map<std::string, int> scalar_seen;
  std::optional<std::string> spacing_family;
  std::optional<double> spacing_value;
  std::optional<std::vector<double>> spacing_list;
  std::optional<SpacingRule::Tail> spacing_tail;

  const auto scalar_once = [&](const std::string& key) {
    if (++scalar_seen[key] > 1) throw ConfigError("key '" + key + "': duplicate value");
  };

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') {
      if (pos > text.size()) break;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }

    if (key == "policy") {
      cfg.policies.push_back(policy_from_string(value));
    } else if (key == "p") {
      cfg.p_values.push_back(parse_double(key, value));
    } else if (key == "t0") {
      cfg.t0_values.push_back(parse_double(key, value));
    } else if (key == "lambda") {
      scalar_once(key);
      cfg.lambda = parse_double(key, value);
    } else if (key == "horizon") {
      scalar_once(key);
      cfg.horizon = parse_double(key, value);
    } else if (key == "e0") {
      scalar_once(key);
      cfg.initial_energy = parse_int(key, value);
    } else if (key == "paths") {
      scalar_once(key);
      cfg.n_paths = parse_int(key, value);
    } else if (key == "seed") {
      scalar_once(key);
      cfg.seed = parse_uint(key, value);
    } else if (key == "checkpoints") {
      scalar_once(key);
      cfg.checkpoints = static_cast<int>(parse_int(key, value));
    } else if (key == "record_trace") {
      scalar_once(key);
      cfg.record_trace = parse_bool(key, value);
    } else if (key == "feedback") {
      scalar_once(key);
      cfg.feedback = feedback_from_string(value);
    } else if (key == "spacing_family") {
      scalar_once(key);
      spacing_family = std::string(value);
    } else if (key == "spacing_value") {
      scalar_once(key);
      spacing_value = parse_double(key, value);
    } else if (key == "spacings") {
      scalar_once(key);
      spacing_list = parse_double_list(key, value);
    } else if (key == "spacing_tail") {
      scalar_once(key);
      spacing_tail = tail_from_string(value);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  if (cfg.policies.empty()) cfg.policies.push_back(PolicyKind::Bu);
  if (cfg.p_values.empty()) cfg.p_values.push_back(1.0);

  if (spacing_family) {
    if (spacing_list) {
      throw ConfigError("key 'spacing_family': conflicts with explicit 'spacings'");
    }
    if (!spacing_value) throw ConfigError("key 'spacing_value': required with spacing_family");
    if (*spacing_family == "constant") {
      cfg.spacings = SpacingRule::constant(*spacing_value);
    } else if (*spacing_family == "linear") {
      cfg.spacings = SpacingRule::linear(*spacing_value);
    } else {
      throw ConfigError("unknown spacing_family '" + *spacing_family + "'");
    }
  } else if (spacing_list) {
    SpacingRule rule;
    rule.prefix = *spacing_list;
    rule.tail = spacing_tail.value_or(SpacingRule::Tail::Constant);
    rule.validate();
    cfg.spacings = rule;
  } else if (spacing_value || spacing_tail) {
    throw ConfigError("spacing_value/spacing_tail given without spacing_family or spacings");
  }

  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void write_config(std::ostream& out, const ExperimentConfig& config) {
  for (PolicyKind kind : config.policies) out << "policy = " << to_string(kind) << "\n";
  for (double p : config.p_values) out << "p = " << fmt_double(p) << "\n";
  for (double t0 : config.t0_values) out << "t0 = " << fmt_double(t0) << "\n";
  out << "lambda = " << fmt_double(config.lambda) << "\n";
  out << "horizon = " << fmt_double(config.horizon) << "\n";
  out << "e0 = " << config.initial_energy << "\n";
  out << "paths = " << config.n_paths << "\n";
  out << "seed = " << config.seed << "\n";
  out << "checkpoints = " << config.checkpoints << "\n";
  out << "record_trace = " << (config.record_trace ? "true" : "false") << "\n";
  if (config.feedback) out << "feedback = " << to_string(*config.feedback) << "\n";
  if (config.spacings) {
    out << "spacings = ";
    for (std::size_t i = 0; i < config.spacings->prefix.size(); ++i) {
      if (i > 0) out << ",";
      out << fmt_double(config.spacings->prefix[i]);
    }
    out << "\n";
    out << "spacing_tail = " << tail_name(config.spacings->tail) << "\n";
  }
}

void write_manifest(std::ostream& out, const ExperimentConfig& config) {
  out << "# aoisim run manifest (version " << kVersion << ")\n";
  write_config(out, config);
}

std::string cell_label(const SimConfig& cell) {
  std::string label = to_string(cell.policy.kind);
  label += "_p";
  label += fmt_short(cell.p);
  if (cell.policy.t0) {
    label += "_T0";
    label += fmt_short(*cell.policy.t0);
  }
  return label;
}

}  // namespace aoisim
