#include "lyapnet/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "lyapnet/io.hpp"

namespace lyapnet {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - f) + sorted[hi] * f;
}

using CellKey = std::tuple<Eigen::Index, double, int, int>;

std::map<CellKey, std::vector<double>> group_cells(const std::vector<ResultRecord>& records) {
  std::map<CellKey, std::vector<double>> cells;
  for (const auto& r : records) {
    auto& v = cells[{r.p, r.epsilon, static_cast<int>(r.dynamics), static_cast<int>(r.method)}];
    if (r.ok() && std::isfinite(r.alignment)) v.push_back(r.alignment);
  }
  return cells;
}

}  // namespace

std::string records_to_csv(const std::vector<ResultRecord>& records) {
  std::string out = "n,p,epsilon,dynamics,method,trial,seed,alignment,status,wall_time\n";
  for (const auto& r : records) {
    out += std::to_string(r.n) + ',' + std::to_string(r.p) + ',' + num(r.epsilon) + ',' + to_string(r.dynamics) + ',' +
           to_string(r.method) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
           num(r.alignment) + ',' + r.status + ',' + num(r.wall_time) + '\n';
  }
  return out;
}

std::vector<ResultRecord> records_from_csv(const std::string& text) {
  std::vector<ResultRecord> out;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("n,", 0) == 0) continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 10) {
      throw Error(ErrorCode::ParseError, "records CSV line " + std::to_string(line_no) + ": expected 10 fields");
    }
    try {
      ResultRecord r;
      r.n = std::stoll(cells[0]);
      r.p = std::stoll(cells[1]);
      r.epsilon = std::stod(cells[2]);
      r.dynamics = parse_dynamics(cells[3]);
      r.method = parse_method(cells[4]);
      r.trial = std::stoi(cells[5]);
      r.seed = std::stoull(cells[6]);
      r.alignment = cells[7] == "nan" ? std::nan("") : std::stod(cells[7]);
      r.status = cells[8];
      r.wall_time = cells[9] == "nan" ? std::nan("") : std::stod(cells[9]);
      out.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw Error(ErrorCode::ParseError, "records CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string records_to_json(const std::vector<ResultRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j = {{"n", r.n},
                        {"p", r.p},
                        {"epsilon", r.epsilon},
                        {"dynamics", to_string(r.dynamics)},
                        {"method", to_string(r.method)},
                        {"trial", r.trial},
                        {"seed", r.seed},
                        {"status", r.status},
                        {"wall_time", r.wall_time}};
    j["alignment"] = std::isfinite(r.alignment) ? nlohmann::json(r.alignment) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string summary_to_csv(const std::vector<ResultRecord>& records) {
  std::map<CellKey, std::size_t> totals;
  for (const auto& r : records)
    ++totals[{r.p, r.epsilon, static_cast<int>(r.dynamics), static_cast<int>(r.method)}];
  std::string out = "p,epsilon,dynamics,method,count,failures,median,mean,q1,q3\n";
  for (const auto& [key, values] : group_cells(records)) {
    const auto& [p, eps, dyn, method] = key;
    const BoxStats s = box_stats(values);
    const bool empty = values.empty();
    out += std::to_string(p) + ',' + num(eps) + ',' + to_string(static_cast<Dynamics>(dyn)) + ',' +
           to_string(static_cast<Method>(method)) + ',' + std::to_string(values.size()) + ',' +
           std::to_string(totals[key] - values.size()) + ',' + num(empty ? std::nan("") : s.median) + ',' +
           num(empty ? std::nan("") : s.mean) + ',' + num(empty ? std::nan("") : s.q1) + ',' +
           num(empty ? std::nan("") : s.q3) + '\n';
  }
  return out;
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  double total = 0.0;
  for (const double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  bool have_low = false;
  for (const double v : values) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
      continue;
    }
    if (!have_low) {
      s.whisker_low = v;
      have_low = true;
    }
    s.whisker_high = v;
  }
  return s;
}

std::string boxplot_svg(const std::vector<ResultRecord>& records, Eigen::Index p) {
  std::vector<double> eps;
  std::vector<std::pair<int, int>> series;  // (method, dynamics)
  for (const auto& r : records) {
    if (r.p != p) continue;
    if (std::find(eps.begin(), eps.end(), r.epsilon) == eps.end()) eps.push_back(r.epsilon);
    const std::pair<int, int> s{static_cast<int>(r.method), static_cast<int>(r.dynamics)};
    if (std::find(series.begin(), series.end(), s) == series.end()) series.push_back(s);
  }
  std::sort(eps.begin(), eps.end());
  std::sort(series.begin(), series.end());
  const auto cells = group_cells(records);

  const double left = 60, top = 40, plot_h = 360, group_w = std::max<double>(120, 22.0 * series.size() + 20);
  const double plot_w = group_w * std::max<std::size_t>(1, eps.size());
  const double legend_h = 18.0 * static_cast<double>(series.size()) + 10;
  const double width = left + plot_w + 20, height = top + plot_h + 50 + legend_h;
  auto y_of = [&](double a) { return top + (1.0 - (std::clamp(a, -1.0, 1.0) + 1.0) / 2.0) * plot_h; };
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">alignment, p = " << p
      << "</text>\n";
  for (double tick = -1.0; tick <= 1.0 + 1e-9; tick += 0.5) {
    svg << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << y_of(tick) << "\" y2=\"" << y_of(tick)
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << y_of(tick) + 4 << "\" text-anchor=\"end\">" << short_num(tick)
        << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double box_w = 14;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const double gx = left + group_w * static_cast<double>(e);
    svg << "<text x=\"" << gx + group_w / 2 << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">eps = "
        << short_num(eps[e]) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
      const auto it = cells.find({p, eps[e], series[k].second, series[k].first});
      if (it == cells.end() || it->second.empty()) continue;
      const BoxStats s = box_stats(it->second);
      const char* color = palette[k % 10];
      const double cx = gx + 10 + 22.0 * static_cast<double>(k) + box_w / 2;
      svg << "<g stroke=\"" << color << "\" fill=\"none\">\n";
      svg << "<line x1=\"" << cx << "\" x2=\"" << cx << "\" y1=\"" << y_of(s.whisker_high) << "\" y2=\""
          << y_of(s.q3) << "\"/>\n";
      svg << "<line x1=\"" << cx << "\" x2=\"" << cx << "\" y1=\"" << y_of(s.q1) << "\" y2=\""
          << y_of(s.whisker_low) << "\"/>\n";
      // Notched box: notch half-width 1.57 IQR / sqrt(count).
      const double notch = 1.57 * (s.q3 - s.q1) / std::sqrt(static_cast<double>(s.count));
      const double nlo = std::max(s.q1, s.median - notch), nhi = std::min(s.q3, s.median + notch);
      const double x0 = cx - box_w / 2, x1 = cx + box_w / 2, xi0 = cx - box_w / 4, xi1 = cx + box_w / 4;
      svg << "<path fill=\"" << color << "\" fill-opacity=\"0.25\" d=\"M" << x0 << ',' << y_of(s.q3) << " L" << x1
          << ',' << y_of(s.q3) << " L" << x1 << ',' << y_of(nhi) << " L" << xi1 << ',' << y_of(s.median) << " L" << x1
          << ',' << y_of(nlo) << " L" << x1 << ',' << y_of(s.q1) << " L" << x0 << ',' << y_of(s.q1) << " L" << x0
          << ',' << y_of(nlo) << " L" << xi0 << ',' << y_of(s.median) << " L" << x0 << ',' << y_of(nhi) << " Z\"/>\n";
      svg << "<line x1=\"" << xi0 << "\" x2=\"" << xi1 << "\" y1=\"" << y_of(s.median) << "\" y2=\""
          << y_of(s.median) << "\" stroke-width=\"2\"/>\n";
      svg << "<line x1=\"" << x0 << "\" x2=\"" << x1 << "\" y1=\"" << y_of(s.mean) << "\" y2=\"" << y_of(s.mean)
          << "\" stroke-dasharray=\"2,2\"/>\n";
      for (const double o : s.outliers)
        svg << "<circle cx=\"" << cx << "\" cy=\"" << y_of(o) << "\" r=\"2\"/>\n";
      svg << "</g>\n";
    }
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double ly = top + plot_h + 40 + 18.0 * static_cast<double>(k);
    svg << "<rect x=\"" << left << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << palette[k % 10]
        << "\"/>\n";
    svg << "<text x=\"" << left + 16 << "\" y=\"" << ly << "\">" << to_string(static_cast<Method>(series[k].first))
        << " (" << to_string(static_cast<Dynamics>(series[k].second)) << ")</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> write_report(const std::vector<ResultRecord>& records,
                                                const std::filesystem::path& dir,
                                                const std::vector<ReportFormat>& formats) {
  std::vector<std::filesystem::path> written;
  auto has = [&](ReportFormat f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
  std::filesystem::create_directories(dir);
  if (has(ReportFormat::Csv)) {
    io::write_text(dir / "records.csv", records_to_csv(records));
    io::write_text(dir / "summary.csv", summary_to_csv(records));
    written.push_back(dir / "records.csv");
    written.push_back(dir / "summary.csv");
  }
  if (has(ReportFormat::Json)) {
    io::write_text(dir / "records.json", records_to_json(records));
    written.push_back(dir / "records.json");
  }
  if (has(ReportFormat::Svg)) {
    std::vector<Eigen::Index> ps;
    for (const auto& r : records)
      if (std::find(ps.begin(), ps.end(), r.p) == ps.end()) ps.push_back(r.p);
    std::sort(ps.begin(), ps.end());
    for (const Eigen::Index p : ps) {
      const auto path = dir / ("boxplot_p" + std::to_string(p) + ".svg");
      io::write_text(path, boxplot_svg(records, p));
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace lyapnet
