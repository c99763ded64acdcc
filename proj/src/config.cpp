#include "epochsa/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace epochsa {
namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"problem",
       {"kind", "d", "D", "mu", "B", "a", "seed", "pool_size", "f_star_draws", "L",
        "lambda", "G"}},
      {"solver", {"algorithm", "eta1", "T1", "alpha", "beta", "gamma", "constrained", "w0"}},
      {"experiment", {"budget_grid", "trials", "base_seed"}},
      {"output", {"csv", "svg", "epoch_csv", "epoch_svg", "verbosity"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

class Reader {
 public:
  Reader(std::map<std::string, Section>& sections, std::vector<std::string>& errors)
      : sections_(sections), errors_(errors) {}

  const Entry* find(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
  }

  bool has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
  }

  void error(const std::string& section, const std::string& key, const std::string& msg) {
    const Entry* e = find(section, key);
    std::string where = e ? "line " + std::to_string(e->line) + ": " : "";
    errors_.push_back(where + section + "." + key + ": " + msg);
  }

  void require(const std::string& section, const std::string& key) {
    if (!has(section, key)) {
      errors_.push_back(section + "." + key + ": missing required key");
    }
  }

  void forbid(const std::string& section, const std::string& key, const std::string& why) {
    if (has(section, key)) error(section, key, "not used " + why);
  }

  std::optional<double> real(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    auto v = parse_real(e->value);
    if (!v) error(section, key, "expected a real number, got '" + e->value + "'");
    return v;
  }

  std::optional<std::uint64_t> integer(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    auto v = parse_uint(e->value);
    if (!v) error(section, key, "expected a nonnegative integer, got '" + e->value + "'");
    return v;
  }

  std::optional<std::string> text(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  static std::optional<double> parse_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  }

  static std::optional<std::uint64_t> parse_uint(const std::string& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
  }

 private:
  std::map<std::string, Section>& sections_;
  std::vector<std::string>& errors_;
};

std::optional<Algorithm> parse_algorithm(const std::string& s) {
  if (s == "epoch_gd") return Algorithm::EpochGD;
  if (s == "fasa") return Algorithm::FASA;
  if (s == "epoch_gd_f") return Algorithm::EpochGDF;
  if (s == "fixed_sgd") return Algorithm::FixedSGD;
  return std::nullopt;
}

}  // namespace

ParseResult parse_config(std::string_view text) {
  ParseResult result;
  auto& errors = result.errors;
  std::map<std::string, Section> sections;

  std::string current;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string at = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(at + "malformed section header '" + line + "'");
        continue;
      }
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!allowed_keys().contains(current)) {
        errors.push_back(at + "unknown section [" + current + "]");
      }
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(at + "expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (current.empty()) {
      errors.push_back(at + "key '" + key + "' outside of any section");
      continue;
    }
    auto allowed = allowed_keys().find(current);
    if (allowed == allowed_keys().end()) continue;  // already reported
    if (!allowed->second.contains(key)) {
      errors.push_back(at + "unknown key '" + key + "' in [" + current + "]");
      continue;
    }
    auto& section = sections[current];
    if (auto prev = section.find(key); prev != section.end()) {
      errors.push_back(at + "duplicate key '" + key + "' in [" + current +
                       "] (first set on line " + std::to_string(prev->second.line) + ")");
      continue;
    }
    section[key] = {value, line_no};
  }

  Reader r(sections, errors);
  ConfigFile cfg;

  // [problem]
  r.require("problem", "kind");
  r.require("problem", "d");
  r.require("problem", "B");
  auto& p = cfg.problem;
  if (auto kind = r.text("problem", "kind")) {
    if (*kind == "least_squares") {
      p.kind = ProblemKind::LeastSquares;
    } else if (*kind == "logistic") {
      p.kind = ProblemKind::Logistic;
    } else {
      r.error("problem", "kind", "expected least_squares or logistic, got '" + *kind + "'");
    }
  }
  if (auto d = r.integer("problem", "d")) {
    p.d = *d;
    if (p.d == 0) r.error("problem", "d", "dimension must be >= 1");
  }
  if (auto B = r.real("problem", "B")) {
    p.B = *B;
    if (!(p.B > 0.0)) r.error("problem", "B", "radius must be > 0");
  }
  if (auto seed = r.integer("problem", "seed")) p.seed = *seed;

  if (p.kind == ProblemKind::LeastSquares) {
    r.forbid("problem", "mu", "by least_squares problems");
    r.forbid("problem", "pool_size", "by least_squares problems");
    r.forbid("problem", "f_star_draws", "by least_squares problems");
    p.D = Vector(p.d, 1.0);
    if (auto D = r.text("problem", "D")) {
      std::vector<double> values;
      bool ok = true;
      for (const auto& item : split_list(*D)) {
        auto v = Reader::parse_real(item);
        if (!v) {
          ok = false;
          break;
        }
        values.push_back(*v);
      }
      if (!ok) {
        r.error("problem", "D", "expected a comma-separated list of reals");
      } else if (values.size() != p.d) {
        r.error("problem", "D", "expected " + std::to_string(p.d) + " entries, got " +
                                    std::to_string(values.size()));
      } else if (std::any_of(values.begin(), values.end(), [](double v) { return !(v > 0.0); })) {
        r.error("problem", "D", "entries must be > 0");
      } else {
        p.D = Vector(values);
      }
    }
    if (auto a = r.real("problem", "a")) {
      p.a = *a;
      if (p.a < 0.0) r.error("problem", "a", "noise half-width must be >= 0");
    }
  } else {
    r.forbid("problem", "D", "by logistic problems");
    r.forbid("problem", "a", "by logistic problems");
    r.require("problem", "mu");
    if (auto mu = r.real("problem", "mu")) {
      p.mu = *mu;
      if (!(p.mu > 0.0)) r.error("problem", "mu", "regularization must be > 0");
    }
    if (auto n = r.integer("problem", "pool_size")) {
      p.pool_size = *n;
      if (p.pool_size < 2) r.error("problem", "pool_size", "must be >= 2");
    }
    if (auto n = r.integer("problem", "f_star_draws")) {
      p.f_star_draws = *n;
      if (p.f_star_draws < 2) r.error("problem", "f_star_draws", "must be >= 2");
    }
  }
  for (const char* key : {"L", "lambda", "G"}) {
    if (auto v = r.real("problem", key)) {
      if (!(*v > 0.0)) r.error("problem", key, "certificate override must be > 0");
      if (std::string(key) == "L") p.L = *v;
      else if (std::string(key) == "lambda") p.lambda = *v;
      else p.G = *v;
    }
  }

  // [solver]
  r.require("solver", "algorithm");
  auto& s = cfg.solver;
  bool algorithm_known = false;
  if (auto alg = r.text("solver", "algorithm")) {
    if (auto a = parse_algorithm(*alg)) {
      s.algorithm = *a;
      algorithm_known = true;
    } else {
      r.error("solver", "algorithm",
              "expected epoch_gd, fasa, epoch_gd_f or fixed_sgd, got '" + *alg + "'");
    }
  }
  if (algorithm_known) {
    const std::string by = "by algorithm " + to_string(s.algorithm);
    if (s.algorithm != Algorithm::EpochGD) {
      r.forbid("solver", "eta1", by);
      r.forbid("solver", "T1", by);
    }
    if (s.algorithm != Algorithm::FASA) r.forbid("solver", "alpha", by);
    if (s.algorithm != Algorithm::EpochGDF) r.forbid("solver", "beta", by);
    if (s.algorithm != Algorithm::FixedSGD) {
      r.forbid("solver", "gamma", by);
      r.forbid("solver", "constrained", by);
    }
  }
  if (auto v = r.real("solver", "eta1")) {
    s.eta1 = *v;
    if (!(s.eta1 > 0.0)) r.error("solver", "eta1", "step size must be > 0");
  }
  if (auto v = r.integer("solver", "T1")) {
    s.T1 = *v;
    if (s.T1 == 0) r.error("solver", "T1", "first epoch length must be >= 1");
  }
  if (auto v = r.real("solver", "alpha")) {
    s.alpha = *v;
    if (!(s.alpha > 1.0)) {
      r.error("solver", "alpha", "requires alpha > 1, got " +
                                     r.find("solver", "alpha")->value);
    }
  }
  if (auto v = r.real("solver", "beta")) {
    s.beta = *v;
    if (!(s.beta > 1.0)) {
      r.error("solver", "beta", "requires beta > 1, got " +
                                    r.find("solver", "beta")->value);
    }
  }
  if (auto v = r.real("solver", "gamma")) {
    s.gamma = *v;
    if (!(s.gamma > 0.0)) r.error("solver", "gamma", "step size must be > 0");
  }
  if (auto v = r.text("solver", "constrained")) {
    if (*v == "true") s.constrained = true;
    else if (*v == "false") s.constrained = false;
    else r.error("solver", "constrained", "expected true or false");
  }
  if (auto v = r.text("solver", "w0")) {
    if (*v == "center") s.start = StartPolicy::Center;
    else if (*v == "boundary") s.start = StartPolicy::Boundary;
    else if (*v == "optimum") s.start = StartPolicy::Optimum;
    else {
      std::vector<double> values;
      bool ok = true;
      for (const auto& item : split_list(*v)) {
        auto x = Reader::parse_real(item);
        if (!x) {
          ok = false;
          break;
        }
        values.push_back(*x);
      }
      if (!ok || values.size() != p.d) {
        r.error("solver", "w0",
                "expected center, boundary, optimum or " + std::to_string(p.d) +
                    " comma-separated coordinates");
      } else {
        s.start = StartPolicy::Explicit;
        s.explicit_start = Vector(values);
        if (p.B > 0.0 && s.explicit_start.norm() > p.B + kGeometryTolerance) {
          r.error("solver", "w0", "explicit start lies outside the ball of radius B");
        }
      }
    }
  }
  if (algorithm_known && s.algorithm == Algorithm::FixedSGD && p.d > 0) {
    double lambda = 0.0;
    double L = 0.0;
    if (p.kind == ProblemKind::LeastSquares && p.D.size() == p.d) {
      const auto [lo, hi] = std::minmax_element(p.D.values().begin(), p.D.values().end());
      lambda = 2.0 * (*lo) * (*lo) / static_cast<double>(p.d);
      L = 2.0 * (*hi) * (*hi);
    } else {
      lambda = p.mu;
      L = 0.25 + p.mu;
    }
    if (p.lambda) lambda = *p.lambda;
    if (p.L) L = *p.L;
    const double gamma = s.gamma > 0.0 ? s.gamma : 1.0 / (2.0 * L);
    if (lambda > 0.0 && !(gamma < 1.0 / lambda)) {
      r.error("solver", "gamma", "requires gamma < 1/lambda");
    }
  }

  // [experiment]
  r.require("experiment", "budget_grid");
  r.require("experiment", "trials");
  auto& e = cfg.experiment;
  if (auto grid = r.text("experiment", "budget_grid")) {
    bool ok = true;
    for (const auto& item : split_list(*grid)) {
      auto v = Reader::parse_uint(item);
      if (!v || *v == 0) {
        ok = false;
        break;
      }
      e.budget_grid.push_back(*v);
    }
    if (!ok || e.budget_grid.empty()) {
      r.error("experiment", "budget_grid", "expected a comma-separated list of positive integers");
    } else if (std::adjacent_find(e.budget_grid.begin(), e.budget_grid.end(),
                                  std::greater_equal<>()) != e.budget_grid.end()) {
      r.error("experiment", "budget_grid", "budgets must be strictly increasing");
    }
  }
  if (auto v = r.integer("experiment", "trials")) {
    e.trials = *v;
    if (e.trials == 0) r.error("experiment", "trials", "must be >= 1");
  }
  if (auto v = r.integer("experiment", "base_seed")) e.base_seed = *v;

  // [output]
  auto& o = cfg.output;
  if (auto v = r.text("output", "csv")) o.csv = *v;
  if (auto v = r.text("output", "svg")) o.svg = *v;
  if (auto v = r.text("output", "epoch_csv")) o.epoch_csv = *v;
  if (auto v = r.text("output", "epoch_svg")) o.epoch_svg = *v;
  if (auto v = r.integer("output", "verbosity")) o.verbosity = static_cast<int>(*v);

  if (errors.empty()) result.config = std::move(cfg);
  return result;
}

ProblemSpec build_problem(const ProblemConfig& config) {
  ProblemSpec spec = config.kind == ProblemKind::LeastSquares
                         ? make_least_squares(config.d, config.D, config.B, config.a, config.seed)
                         : make_logistic(config.d, config.B, config.mu, config.seed,
                                         {config.pool_size, config.f_star_draws, 4.0});
  if (config.L || config.lambda || config.G) {
    ConstantsCertificate c = spec.certificate();
    if (config.L) c.L = *config.L;
    if (config.lambda) c.lambda = *config.lambda;
    if (config.G) c.G = *config.G;
    spec = spec.with_certificate(c);
  }
  return spec;
}

}  // namespace epochsa
