#include "epochsa/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace epochsa {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> data_lines(std::string_view text, std::string_view header) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      if (line != header) throw std::invalid_argument("unexpected CSV header: " + line);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    lines.push_back(line);
  }
  if (first) throw std::invalid_argument("CSV is empty (missing header)");
  return lines;
}

double to_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw std::invalid_argument("malformed number in CSV: '" + s + "'");
  }
  return v;
}

std::size_t to_count(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("malformed count in CSV: '" + s + "'");
  }
  return static_cast<std::size_t>(std::stoull(s));
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("malformed boolean in CSV: '" + s + "'");
}

// Plot geometry.
constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // already transformed
};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string render_svg(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       bool x_is_log) {
  Range xr, yr;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xr.include(x);
      yr.include(y);
    }
  }
  xr.pad();
  yr.pad();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      kWidth, kHeight);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  out += fmt::format("<text x=\"{}\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + pw / 2.0, title);
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, pw, ph);

  // decade ticks on log axes, integer ticks on the epoch axis
  for (double t = std::ceil(yr.lo); t <= std::floor(yr.hi); t += 1.0) {
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{3}\" y=\"{4:.2f}\" font-size=\"10\" text-anchor=\"end\">1e{5}</text>\n",
        kLeft, sy(t), kLeft + pw, kLeft - 4.0, sy(t) + 3.0, static_cast<int>(t));
  }
  const double x_step = x_is_log ? 1.0 : std::max(1.0, std::ceil((xr.hi - xr.lo) / 10.0));
  for (double t = std::ceil(xr.lo); t <= std::floor(xr.hi); t += x_step) {
    const std::string label =
        x_is_log ? fmt::format("1e{}", static_cast<int>(t)) : fmt::format("{}", static_cast<int>(t));
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{3}\" font-size=\"10\" text-anchor=\"middle\">{4}</text>\n",
        sx(t), kTop, kTop + ph, kTop + ph + 14.0, label);
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + pw / 2.0, kHeight - 12.0, x_label);
  out += fmt::format(
      "<text x=\"16\" y=\"{0}\" font-size=\"12\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16 {0})\">{1}</text>\n",
      kTop + ph / 2.0, y_label);

  std::size_t i = 0;
  for (const auto& s : series) {
    const char* colour = kPalette[i % std::size(kPalette)];
    std::string pts;
    for (const auto& [x, y] : s.points) {
      if (!pts.empty()) pts += ' ';
      pts += fmt::format("{:.2f},{:.2f}", sx(x), sy(y));
    }
    out += fmt::format(
        "<polyline class=\"series\" data-algorithm=\"{}\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"2\" points=\"{}\"/>\n",
        s.name, colour, pts);
    const double ly = kTop + 16.0 * static_cast<double>(i) + 10.0;
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n"
        "<text x=\"{4}\" y=\"{5}\" font-size=\"11\">{6}</text>\n",
        kLeft + pw + 10.0, ly, kLeft + pw + 30.0, colour, kLeft + pw + 34.0, ly + 4.0, s.name);
    ++i;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

std::string emit_csv(const std::vector<ResultRow>& rows) {
  std::string out(kResultHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.algorithm, r.T, r.trials,
                       format_real(r.mean_excess), format_real(r.std_error),
                       format_real(r.theoretical_rhs), r.satisfied ? "true" : "false",
                       r.k_dagger, r.gradients_consumed);
  }
  return out;
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  for (const auto& line : data_lines(text, kResultHeader)) {
    const auto f = split_fields(line);
    if (f.size() != 9) throw std::invalid_argument("expected 9 CSV fields: " + line);
    ResultRow r;
    r.algorithm = f[0];
    r.T = to_count(f[1]);
    r.trials = to_count(f[2]);
    r.mean_excess = to_real(f[3]);
    r.std_error = to_real(f[4]);
    r.theoretical_rhs = to_real(f[5]);
    r.satisfied = to_bool(f[6]);
    r.k_dagger = to_count(f[7]);
    r.gradients_consumed = to_count(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string emit_epoch_csv(const std::vector<EpochRow>& rows) {
  std::string out(kEpochHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.algorithm, r.T, r.epoch,
                       format_real(r.mean_excess), format_real(r.std_error));
  }
  return out;
}

std::vector<EpochRow> parse_epoch_csv(std::string_view text) {
  std::vector<EpochRow> rows;
  for (const auto& line : data_lines(text, kEpochHeader)) {
    const auto f = split_fields(line);
    if (f.size() != 5) throw std::invalid_argument("expected 5 CSV fields: " + line);
    rows.push_back({f[0], to_count(f[1]), to_count(f[2]), to_real(f[3]), to_real(f[4])});
  }
  return rows;
}

std::vector<ResultRow> make_rows(const ExperimentResult& result, const ProblemSpec& spec,
                                 const SolverConfig& config, BoundKind kind,
                                 std::vector<BoundReport>* reports) {
  std::vector<ResultRow> rows;
  for (const auto& b : result.budgets) {
    const BoundReport report = check_bound(kind, b, spec, config);
    ResultRow row;
    row.algorithm = to_string(config.algorithm);
    row.T = b.budget;
    row.trials = b.trials.size();
    row.mean_excess = report.empirical_mean;
    row.std_error = report.std_error;
    row.theoretical_rhs = report.theoretical_rhs;
    row.satisfied = report.satisfied;
    if (!b.trials.empty()) {
      row.k_dagger = b.trials.front().epochs;
      row.gradients_consumed = b.trials.front().gradients_consumed;
    }
    rows.push_back(std::move(row));
    if (reports) reports->push_back(report);
  }
  return rows;
}

std::vector<EpochRow> make_epoch_rows(const ExperimentResult& result,
                                      const SolverConfig& config) {
  std::vector<EpochRow> rows;
  for (const auto& b : result.budgets) {
    const auto profile = epoch_profile(b);
    for (std::size_t k = 0; k < profile.size(); ++k) {
      rows.push_back({to_string(config.algorithm), b.budget, k, profile[k].mean,
                      profile[k].std_error});
    }
  }
  return rows;
}

std::string render_rate_svg(const std::vector<ResultRow>& rows) {
  std::map<std::string, Series> by_algorithm;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    auto [it, inserted] = by_algorithm.try_emplace(r.algorithm, Series{r.algorithm, {}});
    if (inserted) order.push_back(r.algorithm);
    if (r.mean_excess > 0.0 && r.T > 0) {
      it->second.points.emplace_back(std::log10(static_cast<double>(r.T)),
                                     std::log10(r.mean_excess));
    }
  }
  std::vector<Series> series;
  for (const auto& name : order) series.push_back(by_algorithm[name]);
  return render_svg(series, "mean excess risk vs budget", "T (gradients)",
                    "mean excess risk", true);
}

std::string render_epoch_svg(const std::vector<EpochRow>& rows) {
  std::map<std::string, std::size_t> largest_T;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    auto [it, inserted] = largest_T.try_emplace(r.algorithm, r.T);
    if (inserted) order.push_back(r.algorithm);
    it->second = std::max(it->second, r.T);
  }
  std::vector<Series> series;
  for (const auto& name : order) {
    Series s{name, {}};
    for (const auto& r : rows) {
      if (r.algorithm == name && r.T == largest_T[name] && r.mean_excess > 0.0) {
        s.points.emplace_back(static_cast<double>(r.epoch), std::log10(r.mean_excess));
      }
    }
    series.push_back(std::move(s));
  }
  return render_svg(series, "mean excess risk vs epoch", "epoch", "mean excess risk", false);
}

}  // namespace epochsa
