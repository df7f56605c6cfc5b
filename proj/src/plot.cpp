#include "levylab/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "levylab/estimators.hpp"

namespace levylab {

namespace {

constexpr std::string_view kCsvHeader =
    "experiment,label,r,C,N,n,value,std_error,n_samples,seed,steps,paths";

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#e377c2",
                                    "#7f7f7f", "#bcbd22", "#393b79", "#ad494a"};
constexpr int kPaletteSize = 12;

std::string fmt(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

/// Fixed-precision pixel coordinate; keeps the SVG byte-stable and compact.
std::string px(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x,
                                 std::chars_format::fixed, 2);
  return std::string(buf, ptr);
}

double parse_csv_double(std::string_view field, std::size_t line_no,
                        std::string_view name) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(),
                                   out);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw std::runtime_error("results CSV row " + std::to_string(line_no) +
                             ": malformed " + std::string(name) + " '" +
                             std::string(field) + "'");
  return out;
}

struct LinearScale {
  double lo = 0.0, hi = 1.0;
  double px0 = 0.0, px1 = 1.0;
  double operator()(double v) const {
    return px0 + (v - lo) / (hi - lo) * (px1 - px0);
  }
};

/// Round a raw step to 1/2/5 times a power of ten.
double nice_step(double span, int ticks) {
  const double raw = span / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  if (frac <= 1.0) return mag;
  if (frac <= 2.0) return 2.0 * mag;
  if (frac <= 5.0) return 5.0 * mag;
  return 10.0 * mag;
}

struct SvgBuilder {
  std::ostringstream body;
  static constexpr double kWidth = 800, kHeight = 520;
  static constexpr double kLeft = 80, kRight = 770, kTop = 50, kBottom = 450;

  void open(std::string_view title) {
    body << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
         << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
         << kHeight << "\">\n";
    body << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
         << "\" fill=\"white\"/>\n";
    body << "<text x=\"" << (kWidth / 2)
         << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "font-size=\"16\">"
         << title << "</text>\n";
  }

  void frame() {
    body << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
         << (kRight - kLeft) << "\" height=\"" << (kBottom - kTop)
         << "\" fill=\"none\" stroke=\"black\"/>\n";
  }

  void text(double x, double y, std::string_view anchor, std::string_view s,
            int size = 12) {
    body << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" text-anchor=\""
         << anchor << "\" font-family=\"sans-serif\" font-size=\"" << size
         << "\">" << s << "</text>\n";
  }

  void line(double x1, double y1, double x2, double y2, std::string_view color,
            double width = 1.0) {
    body << "<line x1=\"" << px(x1) << "\" y1=\"" << px(y1) << "\" x2=\""
         << px(x2) << "\" y2=\"" << px(y2) << "\" stroke=\"" << color
         << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
  }

  void circle(double x, double y, std::string_view color) {
    body << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y)
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                std::string_view color) {
    if (pts.size() < 2) return;
    body << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body << ' ';
      body << px(pts[i].first) << ',' << px(pts[i].second);
    }
    body << "\"/>\n";
  }

  void x_axis(const LinearScale& sx, double step, std::string_view label) {
    for (double v = std::ceil(sx.lo / step) * step; v <= sx.hi + 1e-9 * step;
         v += step) {
      const double x = sx(v);
      line(x, kBottom, x, kBottom + 5, "black");
      text(x, kBottom + 20, "middle", fmt(std::abs(v) < 1e-12 ? 0.0 : v));
    }
    text((kLeft + kRight) / 2, kBottom + 42, "middle", label, 13);
  }

  void y_axis(const LinearScale& sy, double step, std::string_view label,
              bool log10_labels = false) {
    for (double v = std::ceil(sy.lo / step - 1e-9) * step;
         v <= sy.hi + 1e-9 * step; v += step) {
      const double y = sy(v);
      line(kLeft - 5, y, kLeft, y, "black");
      const double shown = log10_labels ? std::pow(10.0, v) : v;
      text(kLeft - 8, y + 4, "end", fmt(std::abs(shown) < 1e-300 ? 0.0 : shown),
           11);
    }
    body << "<text x=\"18\" y=\"" << px((kTop + kBottom) / 2)
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "font-size=\"13\" transform=\"rotate(-90 18 "
         << px((kTop + kBottom) / 2) << ")\">" << label << "</text>\n";
  }

  void no_data() {
    text((kLeft + kRight) / 2, (kTop + kBottom) / 2, "middle", "no data", 18);
  }

  std::string finish() {
    body << "</svg>\n";
    return body.str();
  }
};

void render_cov_decay(SvgBuilder& svg, const std::vector<ResultRow>& rows) {
  struct Pt {
    int n;
    double v, se;
  };
  std::vector<Pt> pts;
  for (const ResultRow& row : rows)
    if (row.label == "cov_hn" && row.n)
      pts.push_back(Pt{*row.n, std::abs(row.value), row.std_error});
  std::sort(pts.begin(), pts.end(),
            [](const Pt& a, const Pt& b) { return a.n < b.n; });

  svg.open("sign-product covariance decay");
  svg.frame();
  if (pts.empty()) {
    LinearScale sx{0, 10, SvgBuilder::kLeft, SvgBuilder::kRight};
    LinearScale sy{-4, 0, SvgBuilder::kBottom, SvgBuilder::kTop};
    svg.x_axis(sx, 2, "n");
    svg.y_axis(sy, 1, "|E[h^n_r h^n_1]|", true);
    svg.no_data();
    return;
  }

  const double floor_v = 1e-6;
  double lo = 0.0, hi = -6.0;
  for (const Pt& p : pts) {
    const double lv = std::log10(std::max(p.v, floor_v));
    lo = std::min(lo, lv);
    hi = std::max(hi, std::log10(std::max(p.v + p.se, floor_v)));
  }
  lo = std::floor(lo) - 0.2;
  hi = std::max(hi + 0.2, lo + 1.0);
  LinearScale sx{static_cast<double>(pts.front().n),
                 static_cast<double>(std::max(pts.back().n, pts.front().n + 1)),
                 SvgBuilder::kLeft, SvgBuilder::kRight};
  LinearScale sy{lo, hi, SvgBuilder::kBottom, SvgBuilder::kTop};
  svg.x_axis(sx, nice_step(sx.hi - sx.lo, 8), "n");
  svg.y_axis(sy, 1, "|E[h^n_r h^n_1]| (log scale)", true);

  const char* color = kPalette[0];
  std::vector<std::pair<double, double>> poly;
  for (const Pt& p : pts) {
    const double x = sx(p.n);
    const double y = sy(std::log10(std::max(p.v, floor_v)));
    const double y_hi = sy(std::log10(std::max(p.v + p.se, floor_v)));
    const double y_lo = sy(std::log10(std::max(p.v - p.se, floor_v)));
    svg.line(x, y_lo, x, y_hi, color);
    poly.emplace_back(x, y);
  }
  svg.polyline(poly, color);
  for (const Pt& p : pts)
    svg.circle(sx(p.n), sy(std::log10(std::max(p.v, floor_v))), color);
}

void render_tau_scan(SvgBuilder& svg, const std::vector<ResultRow>& rows) {
  // One curve per (r, C), keyed in sorted order.
  std::map<std::pair<double, double>, std::vector<const ResultRow*>> series;
  int n_lo = 0, n_hi = 1;
  bool any = false;
  for (const ResultRow& row : rows)
    if (row.label == "tau_lt_1" && row.r && row.C && row.N) {
      series[{*row.r, *row.C}].push_back(&row);
      n_lo = any ? std::min(n_lo, *row.N) : *row.N;
      n_hi = any ? std::max(n_hi, *row.N) : *row.N;
      any = true;
    }

  svg.open("P(tau_{r,C} &lt; 1) by iteration depth");
  svg.frame();
  LinearScale sy{0.0, 1.0, SvgBuilder::kBottom, SvgBuilder::kTop};
  if (!any) {
    LinearScale sx{0, 10, SvgBuilder::kLeft, SvgBuilder::kRight};
    svg.x_axis(sx, 2, "N");
    svg.y_axis(sy, 0.2, "P(tau &lt; 1)");
    svg.no_data();
    return;
  }
  if (n_hi == n_lo) n_hi = n_lo + 1;
  LinearScale sx{static_cast<double>(n_lo), static_cast<double>(n_hi),
                 SvgBuilder::kLeft, SvgBuilder::kRight};
  svg.x_axis(sx, nice_step(sx.hi - sx.lo, 8), "N");
  svg.y_axis(sy, 0.2, "P(tau &lt; 1)");

  int idx = 0;
  for (auto& [key, cells] : series) {
    const char* color = kPalette[idx % kPaletteSize];
    std::vector<const ResultRow*> ordered = cells;
    std::sort(ordered.begin(), ordered.end(),
              [](const ResultRow* a, const ResultRow* b) {
                return *a->N < *b->N;
              });
    std::vector<std::pair<double, double>> poly;
    for (const ResultRow* c : ordered) {
      const double x = sx(*c->N);
      const double y = sy(c->value);
      svg.line(x, sy(std::min(1.0, c->value + c->std_error)), x,
               sy(std::max(0.0, c->value - c->std_error)), color);
      poly.emplace_back(x, y);
    }
    svg.polyline(poly, color);
    for (const ResultRow* c : ordered) svg.circle(sx(*c->N), sy(c->value), color);
    svg.text(SvgBuilder::kRight - 150, SvgBuilder::kTop + 18 + 16 * idx,
             "start", "r=" + fmt(key.first) + " C=" + fmt(key.second), 12);
    svg.line(SvgBuilder::kRight - 170, SvgBuilder::kTop + 14 + 16 * idx,
             SvgBuilder::kRight - 155, SvgBuilder::kTop + 14 + 16 * idx, color,
             2.0);
    ++idx;
  }
}

void render_sup_tail(SvgBuilder& svg, const std::vector<ResultRow>& rows) {
  struct Pt {
    double C, v, se;
  };
  std::vector<Pt> mc;
  for (const ResultRow& row : rows)
    if (row.label == "sup_tail_mc" && row.C)
      mc.push_back(Pt{*row.C, row.value, row.std_error});
  std::sort(mc.begin(), mc.end(),
            [](const Pt& a, const Pt& b) { return a.C < b.C; });

  svg.open("P(sup |B| &gt; C) on [0,1]");
  svg.frame();
  if (mc.empty()) {
    LinearScale sx{0, 4, SvgBuilder::kLeft, SvgBuilder::kRight};
    LinearScale sy{0, 1, SvgBuilder::kBottom, SvgBuilder::kTop};
    svg.x_axis(sx, 1, "C");
    svg.y_axis(sy, 0.2, "P(sup |B| &gt; C)");
    svg.no_data();
    return;
  }

  const double c_lo = std::max(0.05, mc.front().C * 0.7);
  const double c_hi = mc.back().C * 1.15;
  double y_hi = sup_abs_tail_analytic(c_lo);
  for (const Pt& p : mc) y_hi = std::max(y_hi, p.v + p.se);
  y_hi = std::min(1.0, y_hi * 1.1 + 1e-3);
  LinearScale sx{c_lo, c_hi, SvgBuilder::kLeft, SvgBuilder::kRight};
  LinearScale sy{0.0, y_hi, SvgBuilder::kBottom, SvgBuilder::kTop};
  svg.x_axis(sx, nice_step(c_hi - c_lo, 8), "C");
  svg.y_axis(sy, nice_step(y_hi, 6), "P(sup |B| &gt; C)");

  std::vector<std::pair<double, double>> curve;
  for (int i = 0; i <= 100; ++i) {
    const double c = c_lo + (c_hi - c_lo) * i / 100.0;
    curve.emplace_back(sx(c), sy(sup_abs_tail_analytic(c)));
  }
  svg.polyline(curve, kPalette[0]);
  for (const Pt& p : mc) {
    const double x = sx(p.C);
    svg.line(x, sy(std::max(0.0, p.v - p.se)), x, sy(std::min(1.0, p.v + p.se)),
             kPalette[1]);
    svg.circle(x, sy(p.v), kPalette[1]);
  }
  svg.text(SvgBuilder::kRight - 160, SvgBuilder::kTop + 18, "start",
           "analytic series", 12);
  svg.line(SvgBuilder::kRight - 180, SvgBuilder::kTop + 14,
           SvgBuilder::kRight - 165, SvgBuilder::kTop + 14, kPalette[0], 2.0);
  svg.text(SvgBuilder::kRight - 160, SvgBuilder::kTop + 34, "start",
           "Monte Carlo", 12);
  svg.line(SvgBuilder::kRight - 180, SvgBuilder::kTop + 30,
           SvgBuilder::kRight - 165, SvgBuilder::kTop + 30, kPalette[1], 2.0);
}

}  // namespace

std::optional<PlotKind> plot_kind_from_name(std::string_view name) {
  if (name == "cov-decay") return PlotKind::cov_decay;
  if (name == "tau-scan") return PlotKind::tau_scan;
  if (name == "sup-tail") return PlotKind::sup_tail;
  return std::nullopt;
}

std::vector<ResultRow> parse_results_csv(std::string_view text,
                                         std::string* experiment) {
  std::vector<ResultRow> rows;
  std::size_t pos = 0, line_no = 0;
  bool saw_header = false;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    const bool last = nl == text.size();
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (last) break;
      throw std::runtime_error("results CSV row " + std::to_string(line_no) +
                               ": blank line");
    }
    if (!saw_header) {
      if (line != kCsvHeader)
        throw std::runtime_error("results CSV row 1: bad header '" +
                                 std::string(line) + "'");
      saw_header = true;
      if (last) break;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t f = 0;
    while (f <= line.size()) {
      const std::size_t comma = std::min(line.find(',', f), line.size());
      fields.push_back(line.substr(f, comma - f));
      f = comma + 1;
    }
    if (fields.size() != 12)
      throw std::runtime_error("results CSV row " + std::to_string(line_no) +
                               ": expected 12 fields, got " +
                               std::to_string(fields.size()));
    ResultRow row;
    if (experiment && rows.empty()) *experiment = std::string(fields[0]);
    row.label = std::string(fields[1]);
    auto opt_double = [&](std::string_view field, std::string_view name)
        -> std::optional<double> {
      if (field.empty()) return std::nullopt;
      return parse_csv_double(field, line_no, name);
    };
    auto opt_int = [&](std::string_view field,
                       std::string_view name) -> std::optional<int> {
      if (field.empty()) return std::nullopt;
      return static_cast<int>(parse_csv_double(field, line_no, name));
    };
    row.r = opt_double(fields[2], "r");
    row.C = opt_double(fields[3], "C");
    row.N = opt_int(fields[4], "N");
    row.n = opt_int(fields[5], "n");
    row.value = parse_csv_double(fields[6], line_no, "value");
    row.std_error = parse_csv_double(fields[7], line_no, "std_error");
    if (!fields[8].empty())
      row.n_samples =
          static_cast<std::int64_t>(parse_csv_double(fields[8], line_no,
                                                     "n_samples"));
    rows.push_back(std::move(row));
    if (last) break;
  }
  if (!saw_header)
    throw std::runtime_error("results CSV row 1: missing header");
  return rows;
}

std::string render_plot_svg(const std::vector<ResultRow>& rows,
                            std::optional<PlotKind> kind) {
  SvgBuilder svg;
  if (!kind) {
    svg.open("results");
    svg.frame();
    LinearScale sx{0, 10, SvgBuilder::kLeft, SvgBuilder::kRight};
    LinearScale sy{0, 1, SvgBuilder::kBottom, SvgBuilder::kTop};
    svg.x_axis(sx, 2, "x");
    svg.y_axis(sy, 0.2, "y");
    svg.no_data();
    return svg.finish();
  }
  switch (*kind) {
    case PlotKind::cov_decay: render_cov_decay(svg, rows); break;
    case PlotKind::tau_scan: render_tau_scan(svg, rows); break;
    case PlotKind::sup_tail: render_sup_tail(svg, rows); break;
  }
  return svg.finish();
}

void emit_plot(const std::filesystem::path& csv, std::optional<PlotKind> kind,
               const std::filesystem::path& out) {
  std::ifstream in(csv, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open results CSV '" + csv.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string experiment;
  const std::vector<ResultRow> rows = parse_results_csv(buf.str(), &experiment);
  if (!kind && !rows.empty()) {
    kind = plot_kind_from_name(experiment);
    if (!kind)
      throw std::runtime_error("cannot infer a plot kind from experiment '" +
                               experiment + "'; pass --kind");
  }
  const std::string svg = render_plot_svg(rows, kind);
  std::ofstream f(out, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot open output '" + out.string() + "'");
  f << svg;
  f.flush();
  if (!f)
    throw std::runtime_error("write failed for '" + out.string() + "'");
}

}  // namespace levylab
