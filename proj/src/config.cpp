#include "adex/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "adex/csv.hpp"  // fmt_double

namespace adex {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& key,
                       const std::string& what) {
  throw ConfigError("config error at line " + std::to_string(line) + ": " +
                    key + ": " + what);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  if (v == "inf" || v == "+inf")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(line, key, "trailing characters in '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line, key, "expected a number, got '" + v + "'");
  }
}

long parse_long(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) fail(line, key, "trailing characters in '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line, key, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, int line,
                        const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) fail(line, key, "trailing characters in '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(line, key, "expected an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(line, key, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& v, int line,
                                      const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_double(item, line, key));
  if (out.empty()) fail(line, key, "empty list");
  return out;
}

std::vector<long> parse_long_list(const std::string& v, int line,
                                  const std::string& key) {
  std::vector<long> out;
  for (const auto& item : split_list(v)) out.push_back(parse_long(item, line, key));
  if (out.empty()) fail(line, key, "empty list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, double>)
      out += std::isinf(xs[i]) ? "inf" : fmt_double(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

std::string fmt(double x) { return std::isinf(x) ? "inf" : fmt_double(x); }

void validate(const RunConfig& cfg) {
  auto check = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("config error: " + key + ": " + what);
  };
  check(cfg.family == Family::Bernoulli || cfg.family == Family::Gaussian,
        "model.family", "unknown family");
  if (cfg.family == Family::Bernoulli)
    check(cfg.theta0 > 0.0 && cfg.theta0 < 1.0, "model.theta0",
          "must lie in (0,1)");
  check(cfg.policy == "ts" || cfg.policy == "ucb" || cfg.policy == "fixed" ||
            cfg.policy == "alternating",
        "policy.kind", "must be ts, ucb, fixed or alternating");
  check(cfg.ts_alpha > 0.0, "policy.alpha", "must be > 0");
  check(cfg.ts_beta > 0.0, "policy.beta", "must be > 0");
  check(cfg.pi1 >= 0.0 && cfg.pi1 <= 1.0, "policy.pi1", "must be in [0,1]");
  if (cfg.policy == "ts")
    check(cfg.family == Family::Bernoulli, "policy.kind",
          "Beta-Bernoulli Thompson sampling requires family = bernoulli");
  for (long n : cfg.n) check(n >= 0, "run.n", "must be >= 0");
  check(!cfg.n.empty(), "run.n", "empty n ladder");
  check(cfg.reps >= 1, "run.reps", "must be >= 1");
  for (double t : cfg.t_grid)
    check(t >= 0.0 && t <= 1.0, "run.t_grid", "entries must lie in [0,1]");
  check(std::isfinite(cfg.h1), "run.h1", "must be finite");
  check(std::isfinite(cfg.h0), "run.h0", "must be finite");
  check(cfg.estimator == "tstar" || cfg.estimator == "mle" ||
            cfg.estimator == "prior_mean",
        "run.estimator", "must be tstar, mle or prior_mean");
  check(cfg.regret == "in" || cfg.regret == "out", "run.regret",
        "must be in or out");
  check(std::isfinite(cfg.mu0), "prior.mu0", "must be finite");
  check(cfg.nu2 > 0.0, "prior.nu2", "must be > 0 (inf = flat)");
  check(cfg.h_count >= 1, "hgrid.count", "must be >= 1");
  check(cfg.h_max >= cfg.h_min, "hgrid.max", "must be >= hgrid.min");
  check(cfg.eprocess == "gm1" || cfg.eprocess == "gmboth" ||
            cfg.eprocess == "twopoint",
        "eprocess.kind", "must be gm1, gmboth or twopoint");
  check(cfg.ep_nu2 > 0.0 && std::isfinite(cfg.ep_nu2), "eprocess.nu2",
        "must be finite and > 0");
  check(cfg.ep_nu2_0 > 0.0 && std::isfinite(cfg.ep_nu2_0), "eprocess.nu2_0",
        "must be finite and > 0");
  check(cfg.ep_k > 0.0, "eprocess.k", "must be > 0");
  check(cfg.alpha > 0.0 && cfg.alpha < 1.0, "size.alpha",
        "must lie in (0,1)");
  for (double th : cfg.theta0_arm0)
    check(th >= 0.0 && th <= 1.0, "size.theta0_arm0",
          "entries must lie in [0,1]");
  check(cfg.limit_steps >= 1, "limit.steps", "must be >= 1");
  check(cfg.limit_rule == "ts" || cfg.limit_rule == "ucb" ||
            cfg.limit_rule == "fixed",
        "limit.rule", "must be ts, ucb or fixed");
  check(cfg.limit_pi1 >= 0.0 && cfg.limit_pi1 <= 1.0, "limit.pi1",
        "must be in [0,1]");
  check(cfg.limit_nu2 > 0.0, "limit.nu2", "must be > 0 (inf = flat)");
  check(cfg.ba_k >= 0.0, "ba.k", "must be >= 0");
  check(cfg.ba_q >= 0.0, "ba.q", "must be >= 0");
  check(cfg.ba_info > 0.0, "ba.info", "must be > 0");
  check(cfg.ba_input_points >= 1, "ba.input_points", "must be >= 1");
  check(cfg.ba_tol > 0.0, "ba.tol", "must be > 0");
  check(cfg.ba_max_iter >= 1, "ba.max_iter", "must be >= 1");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, std::function<void(const std::string&, int)>> setters;
  auto add = [&](const std::string& path, auto setter) {
    setters[path] = setter;
  };

  add("model.family", [&](const std::string& v, int line) {
    if (v == "bernoulli") cfg.family = Family::Bernoulli;
    else if (v == "gaussian") cfg.family = Family::Gaussian;
    else fail(line, "model.family", "must be bernoulli or gaussian");
  });
  add("model.theta0", [&](const std::string& v, int line) {
    cfg.theta0 = parse_double(v, line, "model.theta0");
  });
  add("policy.kind", [&](const std::string& v, int line) {
    cfg.policy = v;
    (void)line;
  });
  add("policy.alpha", [&](const std::string& v, int line) {
    cfg.ts_alpha = parse_double(v, line, "policy.alpha");
  });
  add("policy.beta", [&](const std::string& v, int line) {
    cfg.ts_beta = parse_double(v, line, "policy.beta");
  });
  add("policy.pi1", [&](const std::string& v, int line) {
    cfg.pi1 = parse_double(v, line, "policy.pi1");
  });
  add("policy.ucb_paper_literal", [&](const std::string& v, int line) {
    cfg.ucb_paper_literal = parse_bool(v, line, "policy.ucb_paper_literal");
  });
  add("run.n", [&](const std::string& v, int line) {
    cfg.n = parse_long_list(v, line, "run.n");
  });
  add("run.reps", [&](const std::string& v, int line) {
    cfg.reps = parse_long(v, line, "run.reps");
  });
  add("run.seed", [&](const std::string& v, int line) {
    cfg.seed = parse_u64(v, line, "run.seed");
  });
  add("run.t_grid", [&](const std::string& v, int line) {
    cfg.t_grid = parse_double_list(v, line, "run.t_grid");
  });
  add("run.h1", [&](const std::string& v, int line) {
    cfg.h1 = parse_double(v, line, "run.h1");
  });
  add("run.h0", [&](const std::string& v, int line) {
    cfg.h0 = parse_double(v, line, "run.h0");
  });
  add("run.estimator", [&](const std::string& v, int line) {
    cfg.estimator = v;
    (void)line;
  });
  add("run.regret", [&](const std::string& v, int line) {
    cfg.regret = v;
    (void)line;
  });
  add("prior.mu0", [&](const std::string& v, int line) {
    cfg.mu0 = parse_double(v, line, "prior.mu0");
  });
  add("prior.nu2", [&](const std::string& v, int line) {
    cfg.nu2 = parse_double(v, line, "prior.nu2");
  });
  add("hgrid.min", [&](const std::string& v, int line) {
    cfg.h_min = parse_double(v, line, "hgrid.min");
  });
  add("hgrid.max", [&](const std::string& v, int line) {
    cfg.h_max = parse_double(v, line, "hgrid.max");
  });
  add("hgrid.count", [&](const std::string& v, int line) {
    cfg.h_count = parse_long(v, line, "hgrid.count");
  });
  add("eprocess.kind", [&](const std::string& v, int line) {
    cfg.eprocess = v;
    (void)line;
  });
  add("eprocess.nu2", [&](const std::string& v, int line) {
    cfg.ep_nu2 = parse_double(v, line, "eprocess.nu2");
  });
  add("eprocess.nu2_0", [&](const std::string& v, int line) {
    cfg.ep_nu2_0 = parse_double(v, line, "eprocess.nu2_0");
  });
  add("eprocess.k", [&](const std::string& v, int line) {
    cfg.ep_k = parse_double(v, line, "eprocess.k");
  });
  add("size.alpha", [&](const std::string& v, int line) {
    cfg.alpha = parse_double(v, line, "size.alpha");
  });
  add("size.theta0_arm0", [&](const std::string& v, int line) {
    cfg.theta0_arm0 = parse_double_list(v, line, "size.theta0_arm0");
  });
  add("limit.steps", [&](const std::string& v, int line) {
    cfg.limit_steps = parse_long(v, line, "limit.steps");
  });
  add("limit.rule", [&](const std::string& v, int line) {
    cfg.limit_rule = v;
    (void)line;
  });
  add("limit.pi1", [&](const std::string& v, int line) {
    cfg.limit_pi1 = parse_double(v, line, "limit.pi1");
  });
  add("limit.nu2", [&](const std::string& v, int line) {
    cfg.limit_nu2 = parse_double(v, line, "limit.nu2");
  });
  add("ba.k", [&](const std::string& v, int line) {
    cfg.ba_k = parse_double(v, line, "ba.k");
  });
  add("ba.q", [&](const std::string& v, int line) {
    cfg.ba_q = parse_double(v, line, "ba.q");
  });
  add("ba.info", [&](const std::string& v, int line) {
    cfg.ba_info = parse_double(v, line, "ba.info");
  });
  add("ba.input_points", [&](const std::string& v, int line) {
    cfg.ba_input_points = parse_long(v, line, "ba.input_points");
  });
  add("ba.tol", [&](const std::string& v, int line) {
    cfg.ba_tol = parse_double(v, line, "ba.tol");
  });
  add("ba.max_iter", [&](const std::string& v, int line) {
    cfg.ba_max_iter = parse_long(v, line, "ba.max_iter");
  });

  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("config error at line " + std::to_string(line) +
                          ": malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config error at line " + std::to_string(line) +
                        ": expected key = value, got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const std::string path = section.empty() ? key : section + "." + key;
    const auto it = setters.find(path);
    if (it == setters.end())
      throw ConfigError("config error at line " + std::to_string(line) +
                        ": unknown key '" + path + "'");
    it->second(value, line);
  }
  validate(cfg);
  return cfg;
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[model]\n";
  out << "family = "
      << (cfg.family == Family::Bernoulli ? "bernoulli" : "gaussian") << "\n";
  out << "theta0 = " << fmt(cfg.theta0) << "\n";
  out << "[policy]\n";
  out << "kind = " << cfg.policy << "\n";
  out << "alpha = " << fmt(cfg.ts_alpha) << "\n";
  out << "beta = " << fmt(cfg.ts_beta) << "\n";
  out << "pi1 = " << fmt(cfg.pi1) << "\n";
  out << "ucb_paper_literal = " << (cfg.ucb_paper_literal ? "true" : "false")
      << "\n";
  out << "[run]\n";
  out << "n = " << join(cfg.n) << "\n";
  out << "reps = " << cfg.reps << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "t_grid = " << join(cfg.t_grid) << "\n";
  out << "h1 = " << fmt(cfg.h1) << "\n";
  out << "h0 = " << fmt(cfg.h0) << "\n";
  out << "estimator = " << cfg.estimator << "\n";
  out << "regret = " << cfg.regret << "\n";
  out << "[prior]\n";
  out << "mu0 = " << fmt(cfg.mu0) << "\n";
  out << "nu2 = " << fmt(cfg.nu2) << "\n";
  out << "[hgrid]\n";
  out << "min = " << fmt(cfg.h_min) << "\n";
  out << "max = " << fmt(cfg.h_max) << "\n";
  out << "count = " << cfg.h_count << "\n";
  out << "[eprocess]\n";
  out << "kind = " << cfg.eprocess << "\n";
  out << "nu2 = " << fmt(cfg.ep_nu2) << "\n";
  out << "nu2_0 = " << fmt(cfg.ep_nu2_0) << "\n";
  out << "k = " << fmt(cfg.ep_k) << "\n";
  out << "[size]\n";
  out << "alpha = " << fmt(cfg.alpha) << "\n";
  out << "theta0_arm0 = " << join(cfg.theta0_arm0) << "\n";
  out << "[limit]\n";
  out << "steps = " << cfg.limit_steps << "\n";
  out << "rule = " << cfg.limit_rule << "\n";
  out << "pi1 = " << fmt(cfg.limit_pi1) << "\n";
  out << "nu2 = " << fmt(cfg.limit_nu2) << "\n";
  out << "[ba]\n";
  out << "k = " << fmt(cfg.ba_k) << "\n";
  out << "q = " << fmt(cfg.ba_q) << "\n";
  out << "info = " << fmt(cfg.ba_info) << "\n";
  out << "input_points = " << cfg.ba_input_points << "\n";
  out << "tol = " << fmt(cfg.ba_tol) << "\n";
  out << "max_iter = " << cfg.ba_max_iter << "\n";
  return out.str();
}

ArmModels RunConfig::models() const {
  ArmModel m{family, theta0};
  return {m, m};
}

PolicyKind RunConfig::policy_kind() const {
  if (policy == "ts") return ThompsonBeta{ts_alpha, ts_beta};
  if (policy == "ucb") return Ucb{ucb_paper_literal};
  if (policy == "fixed") return Fixed{pi1};
  return Alternating{};
}

}  // namespace adex
