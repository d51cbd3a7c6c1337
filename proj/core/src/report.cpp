#include "ssx/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ssx/errors.hpp"

namespace ssx {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void emit_jsonl(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["kernel"] = r.kernel;
    j["pass"] = r.pass;
    j["n_classes"] = r.n_classes;
    j["n_sampled"] = r.n_sampled;
    j["n_embed"] = r.n_embed;
    j["n_batch"] = r.n_batch;
    j["dtype"] = r.dtype;
    j["iters"] = r.iters;
    j["mean_ns"] = r.mean_ns;
    j["p50_ns"] = r.p50_ns;
    j["p95_ns"] = r.p95_ns;
    j["min_ns"] = r.min_ns;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed on " + path.string());
}

void emit_plot_svg(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw ShapeError("emit_plot_svg: need at least one record");
  std::vector<BenchRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return std::tie(a.pass, a.kernel) < std::tie(b.pass, b.kernel);
  });

  constexpr int kBarWidth = 96;
  constexpr int kBarGap = 28;
  constexpr int kPlotHeight = 320;
  constexpr int kMarginLeft = 60;
  constexpr int kMarginTop = 40;
  constexpr int kMarginBottom = 70;
  const int width =
      kMarginLeft + static_cast<int>(sorted.size()) * (kBarWidth + kBarGap) + kBarGap;
  const int height = kMarginTop + kPlotHeight + kMarginBottom;

  std::int64_t max_mean = 1;
  for (const auto& r : sorted) max_mean = std::max(max_mean, r.mean_ns);

  auto out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "  <title>mean latency by kernel and pass</title>\n";
  out << "  <text x=\"" << kMarginLeft << "\" y=\"24\" font-family=\"monospace\" "
         "font-size=\"15\">mean_ns by (pass, kernel), max="
      << max_mean << "</text>\n";
  out << "  <line x1=\"" << kMarginLeft - 8 << "\" y1=\"" << kMarginTop + kPlotHeight
      << "\" x2=\"" << width - kBarGap << "\" y2=\"" << kMarginTop + kPlotHeight
      << "\" stroke=\"black\"/>\n";

  int x = kMarginLeft + kBarGap;
  for (const auto& r : sorted) {
    int bar = static_cast<int>(static_cast<double>(r.mean_ns) / static_cast<double>(max_mean) *
                               kPlotHeight);
    if (bar < 1) bar = 1;
    const int y = kMarginTop + kPlotHeight - bar;
    const char* fill = r.kernel == "full"      ? "#4878a8"
                       : r.kernel == "sampled" ? "#58a868"
                                               : "#c88848";
    out << "  <rect class=\"bar\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << kBarWidth
        << "\" height=\"" << bar << "\" fill=\"" << fill << "\"/>\n";
    out << "  <text x=\"" << x << "\" y=\"" << y - 6
        << "\" font-family=\"monospace\" font-size=\"12\">" << r.mean_ns << "</text>\n";
    out << "  <text x=\"" << x << "\" y=\"" << kMarginTop + kPlotHeight + 20
        << "\" font-family=\"monospace\" font-size=\"12\">" << xml_escape(r.kernel)
        << "</text>\n";
    out << "  <text x=\"" << x << "\" y=\"" << kMarginTop + kPlotHeight + 38
        << "\" font-family=\"monospace\" font-size=\"12\">" << xml_escape(r.pass) << "</text>\n";
    x += kBarWidth + kBarGap;
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed on " + path.string());
}

void emit_train_log(const std::vector<StepLoss>& log, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& entry : log) {
    nlohmann::ordered_json j;
    j["step"] = entry.step;
    j["loss"] = entry.loss;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace ssx
