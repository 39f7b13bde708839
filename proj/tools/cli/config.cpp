#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace gaitd::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError("expected a number, got '" + s + "'", line);
  return v;
}

long long parse_int(const std::string& s, int line) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError("expected an integer, got '" + s + "'", line);
  return v;
}

std::vector<double> parse_doubles(const std::string& text, int line) {
  std::vector<double> out;
  for (const auto& t : tokens(text)) out.push_back(parse_double(t, line));
  return out;
}

double parse_single(const std::string& text, int line) {
  const auto v = parse_doubles(text, line);
  if (v.size() != 1) throw ConfigError("expected exactly one number", line);
  return v[0];
}

bool parse_bool(const std::string& text, int line) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError("expected true or false, got '" + text + "'", line);
}

ConstraintDecl parse_constraint(const std::string& text, int line) {
  ConstraintDecl d;
  d.line = line;
  std::istringstream is(text);
  std::string kind;
  is >> kind;
  std::string rest;
  std::getline(is, rest);
  if (kind == "trivial") {
    d.kind = ConstraintDecl::Kind::Trivial;
  } else if (kind == "parallel") {
    d.kind = ConstraintDecl::Kind::Parallel;
  } else if (kind == "only" || kind == "intercept-only") {
    d.kind = ConstraintDecl::Kind::Only;
    for (const auto& t : tokens(rest)) d.etas.push_back(static_cast<int>(parse_int(t, line)));
    if (d.etas.empty()) throw ConfigError("'only' needs at least one eta index", line);
  } else if (kind == "matrix") {
    d.kind = ConstraintDecl::Kind::Matrix;
    std::vector<std::vector<double>> rows;
    std::istringstream rs(rest);
    for (std::string row; std::getline(rs, row, ';');) {
      if (trim(row).empty()) continue;
      rows.push_back(parse_doubles(row, line));
    }
    if (rows.empty()) throw ConfigError("empty constraint matrix", line);
    d.matrix.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) throw ConfigError("constraint matrix rows differ in length", line);
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        d.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
  } else {
    throw ConfigError("unknown constraint '" + kind + "' (trivial, parallel, only, matrix)", line);
  }
  return d;
}

}  // namespace

const std::vector<std::string>& report_only_sections() {
  static const std::vector<std::string> names = {"fit",  "coefficients", "vcov",     "trace",  "measures",
                                                 "dispersion", "warnings", "gte-result", "gte-table", "intervals", "balance"};
  return names;
}

std::vector<Count> parse_count_list(const std::string& text, int line) {
  std::vector<Count> out;
  for (const auto& t : tokens(text)) {
    const auto dash = t.find('-', 1);
    if (dash != std::string::npos) {
      const auto a = parse_int(t.substr(0, dash), line);
      const auto b = parse_int(t.substr(dash + 1), line);
      if (b < a) throw ConfigError("empty range '" + t + "'", line);
      for (auto v = a; v <= b; ++v) out.push_back(v);
    } else {
      out.push_back(parse_int(t, line));
    }
  }
  return out;
}

ModelConfig parse_config(std::istream& in) {
  ModelConfig cfg;
  std::string section;
  std::set<std::string> seen;
  bool family_set = false;
  int params_line = 0;
  std::vector<std::pair<std::string, int>> link_text;
  int lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {"model", "params", "constraints", "control", "gte", "data"};
      const auto& skip = report_only_sections();
      if (!known.count(section) && std::find(skip.begin(), skip.end(), section) == skip.end()) {
        throw ConfigError("unknown section [" + section + "]", lineno);
      }
      if (section == "params") params_line = lineno;
      continue;
    }
    const auto& skip = report_only_sections();
    if (std::find(skip.begin(), skip.end(), section) != skip.end()) continue;
    if (section.empty()) throw ConfigError("key outside any section", lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(section + "." + key).second) throw ConfigError("duplicate key '" + key + "'", lineno);

    auto& sets = cfg.spec.sets;
    if (section == "model") {
      if (key == "family") {
        const auto f = parse_family(value);
        if (!f) throw ConfigError("unknown family '" + value + "'", lineno);
        cfg.spec.family = *f;
        family_set = true;
      } else if (key == "T") {
        sets.trunc = parse_count_list(value, lineno);
      } else if (key == "T_tail") {
        sets.trunc_tail_start = parse_int(value, lineno);
      } else if (key == "lattice") {
        const auto v = parse_count_list(value, lineno);
        if (v.size() != 2) throw ConfigError("lattice needs 'step offset'", lineno);
        sets.lattice = Lattice{v[0], v[1]};
      } else if (key == "A_p") {
        sets.alt_p = parse_count_list(value, lineno);
      } else if (key == "A_np") {
        sets.alt_np = parse_count_list(value, lineno);
      } else if (key == "I_p") {
        sets.inf_p = parse_count_list(value, lineno);
      } else if (key == "I_np") {
        sets.inf_np = parse_count_list(value, lineno);
      } else if (key == "D_p") {
        sets.def_p = parse_count_list(value, lineno);
      } else if (key == "D_np") {
        sets.def_np = parse_count_list(value, lineno);
      } else if (key == "strict") {
        cfg.spec.strict_identifiability = parse_bool(value, lineno);
      } else if (key == "links") {
        link_text.emplace_back(value, lineno);
      } else {
        throw ConfigError("unknown key '" + key + "' in [model]", lineno);
      }
    } else if (section == "params") {
      auto& p = cfg.params;
      cfg.has_params = true;
      if (key == "theta_pi") p.theta_pi = parse_doubles(value, lineno);
      else if (key == "theta_alpha") p.theta_alpha = parse_doubles(value, lineno);
      else if (key == "theta_iota") p.theta_iota = parse_doubles(value, lineno);
      else if (key == "theta_delta") p.theta_delta = parse_doubles(value, lineno);
      else if (key == "omega_p") p.omega_p = parse_single(value, lineno);
      else if (key == "phi_p") p.phi_p = parse_single(value, lineno);
      else if (key == "psi_p") p.psi_p = parse_single(value, lineno);
      else if (key == "omega_np") p.omega_np = parse_doubles(value, lineno);
      else if (key == "phi_np") p.phi_np = parse_doubles(value, lineno);
      else if (key == "psi_np") p.psi_np = parse_doubles(value, lineno);
      else throw ConfigError("unknown key '" + key + "' in [params]", lineno);
    } else if (section == "constraints") {
      cfg.constraints[key] = parse_constraint(value, lineno);
    } else if (section == "control") {
      auto& c = cfg.control;
      if (key == "tol") c.tol = parse_single(value, lineno);
      else if (key == "beta_tol") c.beta_tol = parse_single(value, lineno);
      else if (key == "max_iter") c.max_iter = static_cast<int>(parse_int(value, lineno));
      else if (key == "step_halving_max") c.step_halving_max = static_cast<int>(parse_int(value, lineno));
      else if (key == "eim_window") c.eim_window = parse_int(value, lineno);
      else if (key == "threads") c.threads = static_cast<unsigned>(parse_int(value, lineno));
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, lineno));
      else if (key == "tail_mass") cfg.spec.dist_options.tail_mass = parse_single(value, lineno);
      else throw ConfigError("unknown key '" + key + "' in [control]", lineno);
    } else if (section == "gte") {
      cfg.gte.present = true;
      if (key == "m") cfg.gte.ms = parse_count_list(value, lineno);
      else if (key == "nu") cfg.gte.nus = parse_count_list(value, lineno);
      else throw ConfigError("unknown key '" + key + "' in [gte]", lineno);
      for (Count v : key == "m" ? cfg.gte.ms : cfg.gte.nus) {
        if (v < (key == "m" ? 1 : 0)) throw ConfigError("out-of-range value in '" + key + "'", lineno);
      }
    } else if (section == "data") {
      auto& d = cfg.data;
      if (key == "response") d.response = value;
      else if (key == "weight") d.weight = value;
      else if (key == "covariates") d.covariates = tokens(value);
      else if (key == "categorical") d.categorical = tokens(value);
      else if (key.rfind("reference.", 0) == 0) d.reference[key.substr(10)] = value;
      else if (key == "intercept") d.intercept = parse_bool(value, lineno);
      else throw ConfigError("unknown key '" + key + "' in [data]", lineno);
    }
  }
  if (!family_set) throw ConfigError("[model] must set 'family'");
  for (const auto& [text, line] : link_text) {
    std::vector<Link> links;
    for (const auto& t : tokens(text)) {
      const auto l = parse_link(t);
      if (!l) throw ConfigError("unknown link '" + t + "'", line);
      links.push_back(*l);
    }
    if (static_cast<int>(links.size()) != family_arity(cfg.spec.family)) {
      throw ConfigError("links must list one link per parent parameter", line);
    }
    cfg.spec.theta_links = links;
  }
  const auto violations = validate_sets(cfg.spec.sets, cfg.spec.family, false);
  if (!violations.empty()) {
    throw ConfigError("invalid special sets: " + violations.front().message);
  }
  if (cfg.has_params) {
    if (cfg.params.theta_pi.empty()) throw ConfigError("[params] must set theta_pi", params_line);
    const auto msg = check_theta(cfg.spec.family, cfg.params.theta_pi);
    if (!msg.empty()) throw ConfigError("theta_pi: " + msg, params_line);
  }
  return cfg;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

GaitdDist config_dist(const ModelConfig& cfg) {
  if (!cfg.has_params) throw ConfigError("a [params] section is required for this command");
  try {
    return GaitdDist(cfg.spec.family, cfg.spec.sets, cfg.params, cfg.spec.dist_options);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[params]: ") + e.what());
  }
}

std::vector<Eigen::MatrixXd> build_constraints(const ModelConfig& cfg, const std::vector<std::string>& x_names,
                                               int M) {
  std::vector<Eigen::MatrixXd> out(x_names.size());
  for (const auto& [name, decl] : cfg.constraints) {
    const auto it = std::find(x_names.begin(), x_names.end(), name);
    if (it == x_names.end()) throw ConfigError("constraint for unknown covariate '" + name + "'", decl.line);
    auto& h = out[static_cast<std::size_t>(it - x_names.begin())];
    switch (decl.kind) {
      case ConstraintDecl::Kind::Trivial:
        h = Eigen::MatrixXd::Identity(M, M);
        break;
      case ConstraintDecl::Kind::Parallel:
        h = Eigen::MatrixXd::Ones(M, 1);
        break;
      case ConstraintDecl::Kind::Only:
        h = Eigen::MatrixXd::Zero(M, static_cast<Eigen::Index>(decl.etas.size()));
        for (std::size_t c = 0; c < decl.etas.size(); ++c) {
          const int j = decl.etas[c];
          if (j < 1 || j > M) throw ConfigError("eta index " + std::to_string(j) + " out of range", decl.line);
          h(j - 1, static_cast<Eigen::Index>(c)) = 1.0;
        }
        break;
      case ConstraintDecl::Kind::Matrix:
        if (decl.matrix.rows() != M) {
          throw ConfigError("constraint matrix needs " + std::to_string(M) + " rows", decl.line);
        }
        h = decl.matrix;
        break;
    }
  }
  return out;
}

}  // namespace gaitd::cli
