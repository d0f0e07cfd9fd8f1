#include "obs/report.hpp"

#include "obs/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace obs::report {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += '\n';
  }
  return out;
}

std::string observability_csv(const dynamics::ObservabilityReport& r) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < r.T.size(); ++i) rows.push_back({r.T[i], r.N[i], r.P[i], r.ratio[i], r.remainder[i]});
  return csv({"T", "N", "P", "ratio", "remainder"}, rows);
}

std::string eigen_csv(const std::vector<EigenRow>& rows) {
  std::string out = "level,k,lambda,residual\n";
  for (const auto& r : rows)
    out += std::to_string(r.level) + "," + std::to_string(r.k) + "," + format_double(r.lambda) + "," +
           format_double(r.residual) + "\n";
  return out;
}

std::string remainder_svg(const dynamics::ObservabilityReport& r) {
  constexpr double width = 640, height = 420, margin = 60;
  std::vector<double> lx, lr, le;
  for (std::size_t i = 0; i < r.T.size(); ++i) {
    if (!(r.T[i] > 0) || !(std::abs(r.remainder[i]) > 0) || !(r.envelope[i] > 0)) continue;
    lx.push_back(std::log10(r.T[i]));
    lr.push_back(std::log10(std::abs(r.remainder[i])));
    le.push_back(std::log10(r.envelope[i]));
  }
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
      << "<text x=\"" << margin << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"14\">|R(T)| on face "
      << r.face << " (log-log), slope " << format_double(r.slope) << "</text>\n";
  if (lx.size() >= 2) {
    const auto [xmin, xmax] = std::minmax_element(lx.begin(), lx.end());
    double ymin = std::min(*std::min_element(lr.begin(), lr.end()), *std::min_element(le.begin(), le.end()));
    double ymax = std::max(*std::max_element(lr.begin(), lr.end()), *std::max_element(le.begin(), le.end()));
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
    const double x0 = *xmin, xs = (*xmax - *xmin) > 0 ? (*xmax - *xmin) : 1.0;
    auto px = [&](double v) { return margin + (v - x0) / xs * (width - 2 * margin); };
    auto py = [&](double v) { return height - margin - (v - ymin) / (ymax - ymin) * (height - 2 * margin); };
    svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    auto polyline = [&](const std::vector<double>& ys, const char* colour) {
      svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
      for (std::size_t i = 0; i < lx.size(); ++i) svg << (i ? " " : "") << px(lx[i]) << "," << py(ys[i]);
      svg << "\"/>\n";
    };
    polyline(lr, "steelblue");
    polyline(le, "firebrick");
    svg << "<text x=\"" << margin << "\" y=\"" << height - 20 << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << "log10 T from " << format_double(*xmin) << " to " << format_double(*xmax) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace obs::report
