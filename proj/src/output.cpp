#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qwalk/cli.hpp"

namespace qwalk {

namespace {

std::string csv_quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string json_escaped(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::string json_number(double x) {
  return std::isfinite(x) ? format_double(x) : std::string("null");
}

std::string px(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

struct PlotSeries {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<std::pair<double, double>> pts;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

// One framed panel with ticks, labels, polylines, and a legend.
void append_panel(std::string& svg, double x0, double y0, double w, double h,
                  const std::string& xlabel, const std::string& ylabel,
                  const std::vector<PlotSeries>& series) {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (xmax - xmin <= 0.0) xmax = xmin + 1.0;
  if (ymax - ymin <= 0.0) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto mapx = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * w; };
  auto mapy = [&](double y) {
    return y0 + h - (y - ymin) / (ymax - ymin) * h;
  };

  svg += "<rect x=\"" + px(x0) + "\" y=\"" + px(y0) + "\" width=\"" + px(w) +
         "\" height=\"" + px(h) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + i * (xmax - xmin) / 4.0;
    const double yv = ymin + i * (ymax - ymin) / 4.0;
    const double gx = mapx(xv);
    const double gy = mapy(yv);
    svg += "<line x1=\"" + px(gx) + "\" y1=\"" + px(y0 + h) + "\" x2=\"" +
           px(gx) + "\" y2=\"" + px(y0 + h + 6) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + px(gx) + "\" y=\"" + px(y0 + h + 22) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + format_double(xv) +
           "</text>\n";
    svg += "<line x1=\"" + px(x0 - 6) + "\" y1=\"" + px(gy) + "\" x2=\"" +
           px(x0) + "\" y2=\"" + px(gy) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + px(x0 - 10) + "\" y=\"" + px(gy + 4) +
           "\" font-size=\"12\" text-anchor=\"end\">" + format_double(yv) +
           "</text>\n";
  }
  svg += "<text x=\"" + px(x0 + w / 2) + "\" y=\"" + px(y0 + h + 42) +
         "\" font-size=\"14\" text-anchor=\"middle\">" + xlabel + "</text>\n";
  svg += "<text x=\"" + px(x0 - 48) + "\" y=\"" + px(y0 + h / 2) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 " +
         px(x0 - 48) + " " + px(y0 + h / 2) + ")\">" + ylabel + "</text>\n";

  for (const auto& s : series) {
    std::string pts;
    for (const auto& [x, y] : s.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!pts.empty()) pts += " ";
      pts += px(mapx(x)) + "," + px(mapy(y));
    }
    if (pts.empty()) continue;
    svg += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\"";
    if (s.dashed) svg += " stroke-dasharray=\"6 4\"";
    svg += " points=\"" + pts + "\"/>\n";
  }

  double ly = y0 + 16;
  for (const auto& s : series) {
    const double lx = x0 + w - 210;
    svg += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" +
           px(lx + 26) + "\" y2=\"" + px(ly - 4) + "\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\"" +
           (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    svg += "<text x=\"" + px(lx + 32) + "\" y=\"" + px(ly) +
           "\" font-size=\"12\">" + s.label + "</text>\n";
    ly += 16;
  }
}

bool is_rate_family(Model m) {
  return m == Model::rate || m == Model::rate_selfconsistent;
}

std::string svg_document(double width, double height, const std::string& body) {
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    px(width) + "\" height=\"" + px(height) + "\" viewBox=\"0 0 " +
                    px(width) + " " + px(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += body;
  svg += "</svg>\n";
  return svg;
}

std::string dynamics_svg(const SweepResult& result) {
  std::vector<PlotSeries> rho_series;
  std::vector<PlotSeries> dm_series;
  int pair_index = 0;
  for (const auto& row : result.rows) {
    if (!row.has_series) continue;
    PlotSeries s;
    s.label = std::string(model_name(row.model)) + " g=" +
              format_double(row.g) + " d=" + format_double(row.delta);
    s.color = kPalette[(pair_index / 2) % kPaletteSize];
    s.dashed = is_rate_family(row.model);
    PlotSeries d = s;
    for (std::size_t i = 0; i < row.series.size(); ++i) {
      s.pts.emplace_back(row.series.times[i], row.series.rho00[i]);
      d.pts.emplace_back(row.series.times[i], row.series.dm_t[i]);
    }
    rho_series.push_back(std::move(s));
    dm_series.push_back(std::move(d));
    ++pair_index;
  }
  std::string body;
  append_panel(body, 80, 30, 720, 360, "t", "launch-site population",
               rho_series);
  append_panel(body, 80, 480, 720, 360, "t", "decay-split displacement",
               dm_series);
  return svg_document(860, 920, body);
}

std::string sweep_points_svg(const SweepResult& result) {
  // Group rows by (model, g, delta); rows inside a group keep sweep order.
  std::vector<PlotSeries> series;
  std::vector<std::string> keys;
  for (const auto& row : result.rows) {
    if (row.failed()) continue;
    const std::string key = std::string(model_name(row.model)) + "|" +
                            format_double(row.g) + "|" +
                            format_double(row.delta);
    std::size_t idx = keys.size();
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i] == key) {
        idx = i;
        break;
      }
    }
    if (idx == keys.size()) {
      keys.push_back(key);
      PlotSeries s;
      s.label = std::string(model_name(row.model));
      if (!is_formula_model(row.model)) {
        s.label += " g=" + format_double(row.g);
        if (row.delta != 0.0) s.label += " d=" + format_double(row.delta);
      }
      s.color = kPalette[idx % kPaletteSize];
      s.dashed = is_formula_model(row.model);
      series.push_back(std::move(s));
    }
    series[idx].pts.emplace_back(row.ratio, row.dm_final);
  }
  std::string body;
  append_panel(body, 80, 30, 720, 420, "coupling ratio v/(v+v')",
               "decay-split displacement", series);
  return svg_document(860, 540, body);
}

}  // namespace

std::string sweep_csv(const SweepResult& result) {
  std::string out = "ratio,model,g,delta,dm_final,stop_time,survival\n";
  for (const auto& row : result.rows) {
    out += format_double(row.ratio);
    out += ",";
    out += model_name(row.model);
    out += ",";
    out += format_double(row.g);
    out += ",";
    out += format_double(row.delta);
    out += ",";
    out += format_double(row.dm_final);
    out += ",";
    out += format_double(row.stop_time);
    out += ",";
    out += format_double(row.survival);
    if (row.failed()) {
      out += ",";
      out += csv_quoted(row.error);
    }
    out += "\n";
  }
  return out;
}

std::string series_csv(const ObservableSeries& series) {
  std::string out = "t,norm,rho00,dm_t\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_double(series.times[i]);
    out += ",";
    out += format_double(series.norm[i]);
    out += ",";
    out += format_double(series.rho00[i]);
    out += ",";
    out += format_double(series.dm_t[i]);
    out += "\n";
  }
  return out;
}

std::string sweep_json(const SweepResult& result) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    out += "  {\"ratio\": " + json_number(row.ratio) + ", \"model\": \"" +
           std::string(model_name(row.model)) + "\", \"g\": " +
           json_number(row.g) + ", \"delta\": " + json_number(row.delta) +
           ", \"dm_final\": " + json_number(row.dm_final) +
           ", \"stop_time\": " + json_number(row.stop_time) +
           ", \"survival\": " + json_number(row.survival);
    if (row.failed()) out += ", \"error\": \"" + json_escaped(row.error) + "\"";
    out += i + 1 < result.rows.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

std::string sweep_svg(const RunConfig& cfg, const SweepResult& result) {
  if (cfg.scenario == "fig4" || cfg.scenario == "fig5") {
    return dynamics_svg(result);
  }
  return sweep_points_svg(result);
}

}  // namespace qwalk
