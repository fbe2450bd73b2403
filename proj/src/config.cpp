#include "ddlab/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace ddlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

double parse_double(const std::string& value, int line, const std::string& field) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError(line, field, "expected a number, got '" + value + "'");
  }
  return v;
}

long long parse_int(const std::string& value, int line, const std::string& field) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError(line, field, "expected an integer, got '" + value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& value, int line, const std::string& field) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos) {
    throw ConfigError(line, field, "expected an unsigned integer, got '" + value + "'");
  }
  return v;
}

std::vector<Index> parse_index_list(const std::string& value, int line,
                                    const std::string& field) {
  std::vector<Index> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(line, field, "empty list entry");
    out.push_back(static_cast<Index>(parse_int(item, line, field)));
  }
  if (out.empty()) throw ConfigError(line, field, "empty list");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1 || (i > 0 && out[i] <= out[i - 1])) {
      throw ConfigError(line, field, "entries must be positive and strictly ascending");
    }
  }
  return out;
}

struct Draft {
  Scenario scenario;
  int section_line = 0;
  bool has_estimator = false;
  double huber_delta = kHuberDelta95;
  double tukey_k = kTukeyK95;
};

void apply_key(Draft& d, const std::string& key, const std::string& value, int line) {
  Scenario& s = d.scenario;
  if (key == "estimator") {
    try {
      s.estimator.kind = estimator_from_name(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, key, e.what());
    }
    d.has_estimator = true;
  } else if (key == "design") {
    if (value == "independent") s.design.kind = DesignKind::independent;
    else if (value == "spiked") s.design.kind = DesignKind::spiked;
    else throw ConfigError(line, key, "expected independent or spiked");
  } else if (key == "mu") {
    s.design.mu = parse_double(value, line, key);
  } else if (key == "rho") {
    s.design.rho = parse_double(value, line, key);
    if (s.design.rho < 0.0) throw ConfigError(line, key, "must be >= 0");
  } else if (key == "beta_law") {
    if (value == "gaussian") s.beta.law = BetaLaw::gaussian;
    else if (value == "uniform") s.beta.law = BetaLaw::uniform;
    else throw ConfigError(line, key, "expected gaussian or uniform");
  } else if (key == "s") {
    s.beta.support_size = static_cast<Index>(parse_int(value, line, key));
    if (s.beta.support_size < 1) throw ConfigError(line, key, "must be >= 1");
  } else if (key == "n_train") {
    s.n_train = static_cast<Index>(parse_int(value, line, key));
    if (s.n_train < 2) throw ConfigError(line, key, "must be >= 2");
  } else if (key == "n_test") {
    s.n_test = static_cast<Index>(parse_int(value, line, key));
    if (s.n_test < 1) throw ConfigError(line, key, "must be >= 1");
  } else if (key == "snr") {
    s.snr = parse_double(value, line, key);
    if (!(s.snr > 0.0)) throw ConfigError(line, key, "must be > 0");
  } else if (key == "contamination") {
    if (value == "none") s.contamination.kind = ContaminationKind::none;
    else if (value == "y_additive") s.contamination.kind = ContaminationKind::y_additive;
    else if (value == "x_rowwise") s.contamination.kind = ContaminationKind::x_rowwise;
    else throw ConfigError(line, key, "expected none, y_additive, or x_rowwise");
  } else if (key == "r") {
    s.contamination.fraction = parse_double(value, line, key);
    if (s.contamination.fraction < 0.0 || s.contamination.fraction >= 1.0) {
      throw ConfigError(line, key, "must lie in [0, 1)");
    }
  } else if (key == "c_out") {
    s.contamination.magnitude = parse_double(value, line, key);
  } else if (key == "p_grid") {
    s.p_grid = parse_index_list(value, line, key);
  } else if (key == "B") {
    s.replications = static_cast<int>(parse_int(value, line, key));
    if (s.replications < 1) throw ConfigError(line, key, "must be >= 1");
  } else if (key == "master_seed") {
    s.master_seed = parse_u64(value, line, key);
  } else if (key == "delta") {
    d.huber_delta = parse_double(value, line, key);
    if (!(d.huber_delta > 0.0)) throw ConfigError(line, key, "must be > 0");
  } else if (key == "k") {
    d.tukey_k = parse_double(value, line, key);
    if (!(d.tukey_k > 0.0)) throw ConfigError(line, key, "must be > 0");
  } else if (key == "max_iter") {
    s.estimator.solver.max_iter = static_cast<int>(parse_int(value, line, key));
    if (s.estimator.solver.max_iter < 1) throw ConfigError(line, key, "must be >= 1");
  } else if (key == "tol_inf") {
    s.estimator.solver.tol_inf = parse_double(value, line, key);
    if (!(s.estimator.solver.tol_inf > 0.0)) throw ConfigError(line, key, "must be > 0");
  } else if (key == "init") {
    if (value == "zero") s.estimator.solver.init = SolverConfig::Init::zero;
    else if (value == "min_norm") s.estimator.solver.init = SolverConfig::Init::min_norm;
    else throw ConfigError(line, key, "expected zero or min_norm");
  } else if (key == "alpha") {
    s.estimator.lts.alpha = parse_double(value, line, key);
    if (!(s.estimator.lts.alpha >= 0.5 && s.estimator.lts.alpha <= 1.0)) {
      throw ConfigError(line, key, "must lie in [0.5, 1]");
    }
  } else if (key == "n_starts") {
    s.estimator.lts.n_starts = static_cast<int>(parse_int(value, line, key));
    if (s.estimator.lts.n_starts < 1) throw ConfigError(line, key, "must be >= 1");
  } else if (key == "n_keep") {
    s.estimator.lts.n_keep = static_cast<int>(parse_int(value, line, key));
    if (s.estimator.lts.n_keep < 1) throw ConfigError(line, key, "must be >= 1");
  } else if (key == "initial_csteps") {
    s.estimator.lts.initial_csteps = static_cast<int>(parse_int(value, line, key));
    if (s.estimator.lts.initial_csteps < 0) throw ConfigError(line, key, "must be >= 0");
  } else if (key == "lambda_frac") {
    s.estimator.lts.lambda_frac = parse_double(value, line, key);
    if (s.estimator.lts.lambda_frac < 0.0) throw ConfigError(line, key, "must be >= 0");
  } else if (key == "max_csteps") {
    s.estimator.lts.max_csteps = static_cast<int>(parse_int(value, line, key));
    if (s.estimator.lts.max_csteps < 1) throw ConfigError(line, key, "must be >= 1");
  } else {
    throw ConfigError(line, "", "unknown key '" + key + "'");
  }
}

void finalize(Draft& d) {
  Scenario& s = d.scenario;
  if (!d.has_estimator) {
    throw ConfigError(d.section_line, "estimator",
                      "scenario '" + s.name + "' does not name an estimator");
  }
  if (s.estimator.lts.n_keep > s.estimator.lts.n_starts) {
    throw ConfigError(d.section_line, "n_keep", "must be <= n_starts");
  }
  switch (s.estimator.kind) {
    case EstimatorKind::huber_gd:
      s.estimator.loss = LossSpec::huber(d.huber_delta);
      break;
    case EstimatorKind::tukey_gd:
      s.estimator.loss = LossSpec::tukey(d.tukey_k);
      break;
    default:
      s.estimator.loss = LossSpec::huber(d.huber_delta);
      break;
  }
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<Scenario> parse_config(const std::string& text) {
  std::vector<Scenario> out;
  std::vector<std::string> seen_names;
  std::optional<Draft> current;

  auto close_section = [&]() {
    if (!current) return;
    finalize(*current);
    out.push_back(current->scenario);
    current.reset();
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(line_no, "", "unterminated section header");
      }
      const std::string inner = trim(line.substr(1, line.size() - 2));
      const std::string prefix = "scenario.";
      if (inner.rfind(prefix, 0) != 0) {
        throw ConfigError(line_no, "", "expected a [scenario.NAME] header");
      }
      const std::string name = inner.substr(prefix.size());
      if (!valid_name(name)) {
        throw ConfigError(line_no, "",
                          "scenario name must match [A-Za-z0-9_-]+, got '" + name + "'");
      }
      for (const std::string& existing : seen_names) {
        if (existing == name) {
          throw ConfigError(line_no, "", "duplicate scenario name '" + name + "'");
        }
      }
      close_section();
      current.emplace();
      current->scenario.name = name;
      current->section_line = line_no;
      seen_names.push_back(name);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "", "expected 'key = value'");
    }
    if (!current) {
      throw ConfigError(line_no, "", "key outside any [scenario.NAME] section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "", "empty key");
    if (value.empty()) throw ConfigError(line_no, key, "empty value");
    apply_key(*current, key, value, line_no);
  }
  close_section();
  if (out.empty()) throw ConfigError(line_no, "", "no [scenario.NAME] sections found");
  return out;
}

std::string serialize_scenarios(const std::vector<Scenario>& scenarios) {
  std::ostringstream out;
  for (const Scenario& s : scenarios) {
    out << "[scenario." << s.name << "]\n";
    out << "estimator = " << estimator_name(s.estimator.kind) << "\n";
    out << "design = "
        << (s.design.kind == DesignKind::independent ? "independent" : "spiked")
        << "\n";
    out << "mu = " << fmt_double(s.design.mu) << "\n";
    out << "rho = " << fmt_double(s.design.rho) << "\n";
    out << "beta_law = "
        << (s.beta.law == BetaLaw::gaussian ? "gaussian" : "uniform") << "\n";
    out << "s = " << s.beta.support_size << "\n";
    out << "n_train = " << s.n_train << "\n";
    out << "n_test = " << s.n_test << "\n";
    out << "snr = " << fmt_double(s.snr) << "\n";
    const char* contamination = "none";
    if (s.contamination.kind == ContaminationKind::y_additive) contamination = "y_additive";
    if (s.contamination.kind == ContaminationKind::x_rowwise) contamination = "x_rowwise";
    out << "contamination = " << contamination << "\n";
    out << "r = " << fmt_double(s.contamination.fraction) << "\n";
    out << "c_out = " << fmt_double(s.contamination.magnitude) << "\n";
    out << "p_grid = ";
    for (std::size_t i = 0; i < s.p_grid.size(); ++i) {
      if (i > 0) out << ",";
      out << s.p_grid[i];
    }
    out << "\n";
    out << "B = " << s.replications << "\n";
    out << "master_seed = " << s.master_seed << "\n";
    if (s.estimator.loss.kind == LossKind::huber) {
      out << "delta = " << fmt_double(s.estimator.loss.tuning) << "\n";
    }
    if (s.estimator.loss.kind == LossKind::tukey) {
      out << "k = " << fmt_double(s.estimator.loss.tuning) << "\n";
    }
    out << "max_iter = " << s.estimator.solver.max_iter << "\n";
    out << "tol_inf = " << fmt_double(s.estimator.solver.tol_inf) << "\n";
    out << "init = "
        << (s.estimator.solver.init == SolverConfig::Init::zero ? "zero" : "min_norm")
        << "\n";
    out << "alpha = " << fmt_double(s.estimator.lts.alpha) << "\n";
    out << "n_starts = " << s.estimator.lts.n_starts << "\n";
    out << "n_keep = " << s.estimator.lts.n_keep << "\n";
    out << "initial_csteps = " << s.estimator.lts.initial_csteps << "\n";
    out << "lambda_frac = " << fmt_double(s.estimator.lts.lambda_frac) << "\n";
    out << "max_csteps = " << s.estimator.lts.max_csteps << "\n";
    out << "\n";
  }
  return out.str();
}

std::optional<std::uint64_t> master_seed_from_env() {
  const char* raw = std::getenv("DDLAB_MASTER_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') {
    throw std::runtime_error("DDLAB_MASTER_SEED is not an unsigned integer: '" +
                             std::string(raw) + "'");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace ddlab
