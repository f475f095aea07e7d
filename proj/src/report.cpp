#include "musent/report.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "musent/errors.hpp"

namespace musent {

namespace {

std::string fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
  return buf.data();
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr std::array<std::string_view, 3> kSeriesColors = {"#4c72b0", "#dd8452", "#55a868"};
constexpr std::array<std::string_view, 3> kSeriesNames = {"precision", "recall", "f1"};

struct Frame {
  double width;
  double height;
  double left = 60;
  double right = 20;
  double top = 50;
  double bottom = 60;

  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
  double y_of(double v) const { return top + plot_h() * (1.0 - v); }
};

void open_svg(std::string& out, const Frame& f, std::string_view title) {
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(f.width, 0) + "\" height=\"" +
         fixed(f.height, 0) + "\" viewBox=\"0 0 " + fixed(f.width, 0) + " " + fixed(f.height, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fixed(f.width, 0) + "\" height=\"" + fixed(f.height, 0) +
         "\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed(f.width / 2, 1) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         xml_escape(title) + "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    const double y = f.y_of(v);
    out += "<line x1=\"" + fixed(f.left, 1) + "\" y1=\"" + fixed(y, 1) + "\" x2=\"" +
           fixed(f.width - f.right, 1) + "\" y2=\"" + fixed(y, 1) + "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + fixed(f.left - 6, 1) + "\" y=\"" + fixed(y + 4, 1) + "\" text-anchor=\"end\">" +
           fixed(v, 1) + "</text>\n";
  }
  out += "<line x1=\"" + fixed(f.left, 1) + "\" y1=\"" + fixed(f.y_of(0), 1) + "\" x2=\"" +
         fixed(f.width - f.right, 1) + "\" y2=\"" + fixed(f.y_of(0), 1) + "\" stroke=\"black\"/>\n";
}

void bar(std::string& out, const Frame& f, double x, double w, double value, std::string_view color) {
  const double y = f.y_of(value);
  out += "<rect x=\"" + fixed(x, 2) + "\" y=\"" + fixed(y, 2) + "\" width=\"" + fixed(w, 2) + "\" height=\"" +
         fixed(f.y_of(0) - y, 2) + "\" fill=\"" + std::string(color) + "\"/>\n";
}

}  // namespace

OrderedJson metrics_to_json(const MetricsReport& report, const ConfusionMatrix& cm) {
  OrderedJson j;
  j["records"] = report.total;
  j["zero_division"] = report.zero_division == ZeroDivision::Zero ? "zero" : "skip";
  j["labels"] = report.labels;
  OrderedJson per_class = OrderedJson::object();
  for (const auto& l : report.labels) {
    const auto& m = report.per_class.at(l);
    per_class[l] = {{"precision", m.precision},
                    {"recall", m.recall},
                    {"f1", m.f1},
                    {"support", m.support},
                    {"predicted", m.predicted},
                    {"precision_undefined", m.precision_undefined},
                    {"recall_undefined", m.recall_undefined}};
  }
  j["per_class"] = std::move(per_class);
  j["macro"] = {{"precision", report.macro.precision}, {"recall", report.macro.recall}, {"f1", report.macro.f1}};
  j["micro"] = {{"precision", report.micro.precision}, {"recall", report.micro.recall}, {"f1", report.micro.f1}};
  j["accuracy"] = report.accuracy;
  j["flagged"] = report.flagged();
  OrderedJson rows = OrderedJson::array();
  for (std::size_t g = 0; g < cm.size(); ++g) {
    OrderedJson row = OrderedJson::array();
    for (std::size_t p = 0; p < cm.size(); ++p) row.push_back(cm.count(g, p));
    rows.push_back(std::move(row));
  }
  j["confusion"] = {{"rows", "gold"}, {"columns", "predicted"}, {"counts", std::move(rows)}};
  return j;
}

OrderedJson join_report_to_json(const JoinReport& r) {
  OrderedJson j;
  j["paired"] = r.paired;
  j["paired_with_gold"] = r.paired_with_gold;
  j["marginalized"] = r.marginalized;
  j["audio_only"] = r.audio_only;
  j["text_only"] = r.text_only;
  j["unknown_song"] = r.unknown_song;
  j["duplicate"] = r.duplicate;
  j["incompatible_labels"] = r.incompatible_labels;
  return j;
}

std::string render_metrics_svg(const MetricsReport& report, std::string_view title) {
  std::vector<std::pair<std::string, std::array<double, 3>>> groups;
  for (const auto& l : report.labels) {
    const auto& m = report.per_class.at(l);
    groups.push_back({l, {m.precision, m.recall, m.f1}});
  }
  groups.push_back({"macro", {report.macro.precision, report.macro.recall, report.macro.f1}});

  const double group_w = 120;
  Frame f{60 + 20 + group_w * static_cast<double>(groups.size()), 340};
  std::string out;
  open_svg(out, f, title);
  const double bar_w = 28;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = f.left + group_w * static_cast<double>(g) + (group_w - 3 * bar_w) / 2;
    for (std::size_t s = 0; s < 3; ++s) {
      const double v = groups[g].second[s];
      const double x = gx + bar_w * static_cast<double>(s);
      bar(out, f, x, bar_w - 2, v, kSeriesColors[s]);
      out += "<text x=\"" + fixed(x + (bar_w - 2) / 2, 2) + "\" y=\"" + fixed(f.y_of(v) - 3, 2) +
             "\" text-anchor=\"middle\" font-size=\"9\">" + fixed(v, 2) + "</text>\n";
    }
    out += "<text x=\"" + fixed(gx + 1.5 * bar_w, 2) + "\" y=\"" + fixed(f.y_of(0) + 16, 2) +
           "\" text-anchor=\"middle\">" + xml_escape(groups[g].first) + "</text>\n";
  }
  for (std::size_t s = 0; s < 3; ++s) {
    const double x = f.left + 110 * static_cast<double>(s);
    const double y = f.height - 18;
    out += "<rect x=\"" + fixed(x, 1) + "\" y=\"" + fixed(y - 10, 1) + "\" width=\"12\" height=\"12\" fill=\"" +
           std::string(kSeriesColors[s]) + "\"/>\n";
    out += "<text x=\"" + fixed(x + 16, 1) + "\" y=\"" + fixed(y, 1) + "\">" + std::string(kSeriesNames[s]) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_sweep_svg(const SweepResult& sweep, std::string_view title, std::string_view metric_name) {
  const double step_w = 28;
  Frame f{60 + 20 + step_w * static_cast<double>(sweep.curve.size()), 340};
  std::string out;
  open_svg(out, f, title);
  for (std::size_t i = 0; i < sweep.curve.size(); ++i) {
    const auto& p = sweep.curve[i];
    const double x = f.left + step_w * static_cast<double>(i) + 3;
    const bool best = p.weight == sweep.best_weight;
    bar(out, f, x, step_w - 6, p.score, best ? kSeriesColors[1] : kSeriesColors[0]);
    out += "<text x=\"" + fixed(x + (step_w - 6) / 2, 2) + "\" y=\"" + fixed(f.y_of(0) + 14, 2) +
           "\" text-anchor=\"middle\" font-size=\"9\">" + fixed(p.weight, 2) + "</text>\n";
  }
  out += "<text x=\"" + fixed(f.left + f.plot_w() / 2, 1) + "\" y=\"" + fixed(f.height - 30, 1) +
         "\" text-anchor=\"middle\">audio weight</text>\n";
  out += "<text x=\"" + fixed(f.left + f.plot_w() / 2, 1) + "\" y=\"" + fixed(f.height - 12, 1) +
         "\" text-anchor=\"middle\">best " + xml_escape(metric_name) + " " + fixed(sweep.best_score, 4) +
         " at w = " + fixed(sweep.best_weight, 2) + "</text>\n";
  out += "</svg>\n";
  return out;
}

std::string format_sweep_curve(const SweepResult& sweep) {
  std::string out = "weight\tscore\n";
  for (const auto& p : sweep.curve) {
    // Shortest round-trip representation, same as the JSON outputs.
    out += OrderedJson(p.weight).dump() + "\t" + OrderedJson(p.score).dump() + "\n";
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot replace '" + path.string() + "'");
  }
}

void write_json(const std::filesystem::path& path, const OrderedJson& doc) { write_file(path, doc.dump(2) + "\n"); }

}  // namespace musent
