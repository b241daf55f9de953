#include "huberbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "huberbench/dataset_io.hpp"

namespace huberbench {

std::string trials_csv_header() {
  return "noise,fraction,trial,l2_error,l1_error,weighted_error,iterations,converged";
}

void write_trials_csv(std::ostream& out, const SweepResult& result) {
  out << trials_csv_header() << '\n';
  for (const auto& r : result.rows) {
    out << r.noise << ',' << format_double(r.fraction) << ',' << r.trial << ',' << format_double(r.l2_error) << ','
        << format_double(r.l1_error) << ',' << format_double(r.weighted_error) << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << '\n';
  }
}

namespace {

int parse_int(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::runtime_error(context + ": expected an integer, got '" + text + "'");
  return value;
}

}  // namespace

std::vector<SweepRow> parse_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trials CSV is empty (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != trials_csv_header()) throw std::runtime_error("trials CSV: unexpected header '" + line + "'");
  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_csv_line(line);
    const std::string ctx = "trials CSV line " + std::to_string(line_no);
    if (cols.size() != 8) throw std::runtime_error(ctx + ": expected 8 columns, got " + std::to_string(cols.size()));
    SweepRow r;
    r.noise = cols[0];
    r.fraction = parse_double(cols[1], ctx);
    r.trial = parse_int(cols[2], ctx);
    r.l2_error = parse_double(cols[3], ctx);
    r.l1_error = parse_double(cols[4], ctx);
    r.weighted_error = parse_double(cols[5], ctx);
    r.iterations = parse_int(cols[6], ctx);
    const int conv = parse_int(cols[7], ctx);
    if (conv != 0 && conv != 1) throw std::runtime_error(ctx + ": converged must be 0 or 1");
    r.converged = conv == 1;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_csv_header() {
  return "noise,fraction,trials,converged,mean_l2,se_l2,mean_l1,se_l1,mean_weighted,se_weighted";
}

void write_summary_csv(std::ostream& out, const SweepSummary& summary) {
  out << summary_csv_header() << '\n';
  for (const auto& p : summary.points) {
    out << p.noise << ',' << format_double(p.fraction) << ',' << p.trials << ',' << p.converged << ','
        << format_double(p.mean_l2) << ',' << format_double(p.se_l2) << ',' << format_double(p.mean_l1) << ','
        << format_double(p.se_l1) << ',' << format_double(p.mean_weighted) << ',' << format_double(p.se_weighted)
        << '\n';
  }
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_svg(std::ostream& out, const SweepSummary& summary, const std::string& title) {
  constexpr double width = 640.0, height = 420.0;
  constexpr double left = 70.0, right = 170.0, top = 40.0, bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const bool weighted = summary.weighted_metric;

  double x_max = 0.0, y_max = 0.0;
  for (const auto& p : summary.points) {
    x_max = std::max(x_max, p.fraction);
    y_max = std::max(y_max, p.mean(weighted) + p.se(weighted));
  }
  if (!(x_max > 0.0)) x_max = 1.0;
  if (!(y_max > 0.0) || !std::isfinite(y_max)) y_max = 1.0;
  auto sx = [&](double x) { return left + plot_w * x / x_max; };
  auto sy = [&](double y) { return top + plot_h * (1.0 - y / y_max); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height) << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << xml_escape(title) << "</text>\n";
  // Axes.
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + plot_h) << "\" x2=\"" << fmt(left + plot_w)
      << "\" y2=\"" << fmt(top + plot_h) << "\"/>\n";
  out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\""
      << fmt(top + plot_h) << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_max * k / 4.0;
    const double yv = y_max * k / 4.0;
    out << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(top + plot_h + 16) << "\" text-anchor=\"middle\">"
        << tick_label(xv) << "</text>\n";
    out << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(sy(yv) + 4) << "\" text-anchor=\"end\">"
        << tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(height - 10)
      << "\" text-anchor=\"middle\">outlier fraction</text>\n";
  out << "<text x=\"16\" y=\"" << fmt(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt(top + plot_h / 2) << ")\">" << (weighted ? "mean Sigma-weighted error" : "mean l2 error")
      << "</text>\n";
  out << "</g>\n";

  std::vector<std::string> noises;
  for (const auto& p : summary.points)
    if (std::find(noises.begin(), noises.end(), p.noise) == noises.end()) noises.push_back(p.noise);
  for (std::size_t k = 0; k < noises.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::ostringstream pts;
    out << "<g stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    for (const auto& p : summary.points) {
      if (p.noise != noises[k]) continue;
      const double x = sx(p.fraction);
      const double y = sy(p.mean(weighted));
      const double lo = sy(p.mean(weighted) - p.se(weighted));
      const double hi = sy(p.mean(weighted) + p.se(weighted));
      pts << fmt(x) << ',' << fmt(y) << ' ';
      out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(lo) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(hi)
          << "\"/>\n";
      out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"2.5\"/>\n";
    }
    std::string poly = pts.str();
    if (!poly.empty()) poly.pop_back();
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"" << poly << "\"/>\n";
    out << "</g>\n";
    const double ly = top + 14.0 + 18.0 * double(k);
    out << "<line x1=\"" << fmt(left + plot_w + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(left + plot_w + 32) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(left + plot_w + 38) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(noises[k]) << "</text>\n";
  }
  out << "</svg>\n";
}

namespace {

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

void emit_outputs(const SweepResult& result, const SweepSummary* summary, const OutputPaths& paths,
                  const std::string& title) {
  if (paths.trials_csv) write_file(*paths.trials_csv, [&](std::ostream& o) { write_trials_csv(o, result); });
  SweepSummary empty;
  empty.weighted_metric = result.weighted_metric;
  const SweepSummary& s = summary ? *summary : empty;
  if (paths.summary_csv) write_file(*paths.summary_csv, [&](std::ostream& o) { write_summary_csv(o, s); });
  if (paths.svg) write_file(*paths.svg, [&](std::ostream& o) { write_svg(o, s, title); });
}

}  // namespace huberbench
