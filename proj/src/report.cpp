#include "trl/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "trl/errors.hpp"

namespace trl::report {

namespace {

std::string num(double v) { return std::isfinite(v) ? fmt::format("{:.6g}", v) : "nan"; }

nlohmann::json json_num(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly five "nice" tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return t;
}

}  // namespace

std::string sweep_csv(const sweep::SweepTable& table) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : table.rows) {
    out += fmt::format("{},{:g},{},{},{},{},{},{}\n", sweep::to_string(r.family), r.param,
                       num(r.in_plane_mm), num(r.angular_deg), num(r.kappa_nmm_per_rad), num(r.scf),
                       r.dof, sweep::to_string(r.status));
  }
  return out;
}

nlohmann::json sweep_json(const sweep::SweepTable& table) {
  nlohmann::json j;
  j["family"] = sweep::to_string(table.family);
  j["loads"] = {{"force_n", table.force_n}, {"moment_nmm", table.moment_nmm}};
  j["material"] = {{"name", table.material},
                   {"youngs_modulus_pa", table.youngs_modulus_pa},
                   {"poisson_ratio", table.poisson_ratio}};
  j["convergence"] = {{"tolerance", table.tolerance},
                      {"initial_edge_mm", table.initial_edge_mm},
                      {"dof_budget", table.dof_budget}};
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json row = {
        {"family", sweep::to_string(r.family)},
        {"param", r.param},
        {"in_plane_mm", json_num(r.in_plane_mm)},
        {"angular_deg", json_num(r.angular_deg)},
        {"kappa_Nmm_per_rad", json_num(r.kappa_nmm_per_rad)},
        {"kappa_check_Nmm_per_rad", json_num(r.kappa_check_nmm_per_rad)},
        {"scf", json_num(r.scf)},
        {"dof", r.dof},
        {"status", sweep::to_string(r.status)},
        {"provenance",
         {{"final_edge_mm", r.final_edge_mm},
          {"levels", r.levels},
          {"last_relative_change", json_num(r.last_relative_change)},
          {"tolerance", r.tolerance},
          {"material", r.material}}}};
    if (!r.message.empty()) row["message"] = r.message;
    rows.push_back(std::move(row));
  }
  return j;
}

nlohmann::json timing_json(const sweep::SweepTable& table) {
  nlohmann::json j;
  j["generated_utc"] = utc_timestamp();
  auto& rows = j["solve_seconds"] = nlohmann::json::array();
  double total = 0.0;
  for (const auto& r : table.rows) {
    rows.push_back({{"param", r.param}, {"seconds", r.solve_seconds}});
    total += r.solve_seconds;
  }
  j["total_solve_seconds"] = total;
  return j;
}

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<Series>& series) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  ymin = std::min(ymin, 0.0);
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  ymax += 0.05 * (ymax - ymin);
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string o = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kW, kH, kW, kH);
  o += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kW, kH);
  o += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                   kW / 2, xml_escape(title));
  o += fmt::format(
      "<polyline points=\"{},{} {},{} {},{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop,
      kLeft, kTop + ph, kLeft + pw, kTop + ph);
  for (double t : ticks(xmin, xmax)) {
    o += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>"
                     "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:g}</text>\n",
                     sx(t), kTop + ph, kTop + ph + 5, kTop + ph + 18, t);
  }
  for (double t : ticks(ymin, ymax)) {
    o += fmt::format("<line x1=\"{0}\" y1=\"{2:.2f}\" x2=\"{1}\" y2=\"{2:.2f}\" stroke=\"black\"/>"
                     "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:g}</text>\n",
                     kLeft - 5, kLeft, sy(t), kLeft - 8, sy(t) + 4, t);
  }
  o += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
                   kH - 15, xml_escape(x_label));
  o += fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
      kTop + ph / 2, xml_escape(y_label));
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % 4];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", sx(s.x[i]), sy(s.y[i]));
    }
    o += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                     pts, color);
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", sx(s.x[i]),
                       sy(s.y[i]), color);
    }
    if (!s.label.empty()) {
      o += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", kLeft + pw - 150,
                       kTop + 15 + 15 * k, color, xml_escape(s.label));
    }
  }
  o += "</svg>\n";
  return o;
}

std::string sweep_svg(const sweep::SweepTable& table, sweep::Metric metric) {
  Series s;
  s.label = fmt::format("{} sweep", sweep::to_string(table.family));
  for (const auto& r : table.rows) {
    if (r.status == sweep::RowStatus::Failed) continue;
    s.x.push_back(r.param);
    s.y.push_back(sweep::metric_value(r, metric));
  }
  const bool trl = table.family == sweep::Family::Trl;
  const std::string x_label = trl ? "number of triangles" : "thickness (mm)";
  if (metric == sweep::Metric::InPlane) {
    return svg_line_plot(fmt::format("In-plane tip displacement, F = {:g} N", table.force_n),
                         x_label, "in-plane displacement (mm)", {s});
  }
  return svg_line_plot(fmt::format("Angular displacement, M = {:g} N*mm", table.moment_nmm), x_label,
                       "angular displacement (deg)", {s});
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace trl::report
