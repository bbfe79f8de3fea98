#include "xrl/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "xrl/error.hpp"
#include "xrl/nnet/serialize.hpp"
#include "xrl/ppo/train_log.hpp"

namespace xrl::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// File-name-safe rendering of a task value.
std::string value_tag(double v) {
  std::string s = fmt("%.6g", v);
  for (char& c : s) {
    if (c == '-') c = 'm';
    if (c == '+') c = 'p';
  }
  return s;
}

}  // namespace

std::string render_chart(const std::string& title, const std::vector<PlotRow>& rows) {
  std::map<std::string, std::vector<const PlotRow*>> series;
  double x_min = INFINITY, x_max = -INFINITY, y_min = INFINITY, y_max = -INFINITY;
  for (const auto& r : rows) {
    series[r.algo];
    if (!std::isfinite(r.mean) || !std::isfinite(r.std)) continue;
    series[r.algo].push_back(&r);
    x_min = std::min(x_min, double(r.iteration));
    x_max = std::max(x_max, double(r.iteration));
    y_min = std::min(y_min, r.mean - r.std);
    y_max = std::max(y_max, r.mean + r.std);
  }
  if (!std::isfinite(x_min)) x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_min -= 1, y_max += 1;
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";

  // Axes and ticks.
  svg << "<g stroke=\"#444\" fill=\"none\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\"/>\n</g>\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = x_min + (x_max - x_min) * i / kTicks;
    const double fy = y_min + (y_max - y_min) * i / kTicks;
    svg << "<text x=\"" << fmt("%.1f", px(fx)) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << fmt("%.0f", fx) << "</text>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt("%.1f", py(fy) + 4)
        << "\" text-anchor=\"end\">" << fmt("%.4g", fy) << "</text>\n"
        << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + plot_w << "\" y1=\""
        << fmt("%.1f", py(fy)) << "\" y2=\"" << fmt("%.1f", py(fy))
        << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">iteration</text>\n"
      << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\">mean return</text>\n";

  std::size_t k = 0;
  for (auto& [algo, pts] : series) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::sort(pts.begin(), pts.end(),
              [](const PlotRow* a, const PlotRow* b) { return a->iteration < b->iteration; });
    if (!pts.empty()) {
      // Band of mean ± std, then the mean line.
      std::ostringstream band, line;
      for (const auto* p : pts) {
        band << fmt("%.2f", px(p->iteration)) << ',' << fmt("%.2f", py(p->mean + p->std)) << ' ';
        line << fmt("%.2f", px(p->iteration)) << ',' << fmt("%.2f", py(p->mean)) << ' ';
      }
      for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        band << fmt("%.2f", px((*it)->iteration)) << ','
             << fmt("%.2f", py((*it)->mean - (*it)->std)) << ' ';
      }
      svg << "<polygon points=\"" << band.str() << "\" fill=\"" << color
          << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n"
          << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = kTop + 14 + 16 * double(k);
    svg << "<line x1=\"" << kWidth - kRight + 12 << "\" x2=\"" << kWidth - kRight + 32
        << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly << "\">" << xml_escape(algo)
        << "</text>\n";
    ++k;
  }
  svg << "</svg>\n";
  return svg.str();
}

PlotFiles emit_plot_data(const TransferReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create plot directory: " + ec.message());

  std::map<std::pair<double, std::string>, std::vector<PlotRow>> tasks;
  for (const auto& r : report.rows) {
    tasks[{r.value, r.param}].push_back(PlotRow{r.algo, r.iteration, r.mean, r.std});
  }
  PlotFiles files;
  std::size_t index = 0;
  for (auto& [key, rows] : tasks) {
    const auto& [value, param] = key;
    std::stable_sort(rows.begin(), rows.end(), [](const PlotRow& a, const PlotRow& b) {
      return std::tie(a.algo, a.iteration) < std::tie(b.algo, b.iteration);
    });
    char stem[160];
    std::snprintf(stem, sizeof stem, "task_%02zu_%s_%s", index++, param.c_str(),
                  value_tag(value).c_str());
    std::ostringstream csv;
    csv << "algo,iter,mean,std\n";
    for (const auto& r : rows) {
      csv << r.algo << ',' << r.iteration << ',' << ppo::format_double(r.mean) << ','
          << ppo::format_double(r.std) << '\n';
    }
    const fs::path csv_path = dir / (std::string(stem) + ".csv");
    const fs::path svg_path = dir / (std::string(stem) + ".svg");
    nnet::write_file_atomic(csv_path, csv.str());
    nnet::write_file_atomic(svg_path,
                            render_chart(param + " = " + ppo::format_double(value), rows));
    files.csv.push_back(csv_path);
    files.svg.push_back(svg_path);
  }
  return files;
}

std::vector<PlotRow> read_plot_csv(const fs::path& path) {
  std::istringstream in(nnet::read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "algo,iter,mean,std") {
    throw IoError(path.string(), "not a plot CSV");
  }
  std::vector<PlotRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string algo, iter, mean, sd;
    if (!std::getline(cells, algo, ',') || !std::getline(cells, iter, ',') ||
        !std::getline(cells, mean, ',') || !std::getline(cells, sd)) {
      throw IoError(path.string(), "malformed row: " + line);
    }
    try {
      rows.push_back(PlotRow{algo, std::stoull(iter), std::stod(mean), std::stod(sd)});
    } catch (const std::exception&) {
      throw IoError(path.string(), "malformed row: " + line);
    }
  }
  return rows;
}

}  // namespace xrl::harness
