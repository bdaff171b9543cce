#include "firesig/plot.hpp"

#include <fmt/format.h>

namespace firesig {

namespace {

constexpr double kW = 720.0;
constexpr double kH = 360.0;
constexpr double kLeft = 56.0;
constexpr double kRight = 16.0;
constexpr double kTop = 32.0;
constexpr double kBottom = 40.0;

double px(double angle) { return kLeft + angle / 359.0 * (kW - kLeft - kRight); }
double py(double value) { return kH - kBottom - value * (kH - kTop - kBottom); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string signature_svg(const PatternFeatures& f, const std::string& title) {
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">{3}</text>\n",
      kW, kH, kLeft, escape(title));
  // Axes and ticks.
  s += fmt::format("<g class=\"axes\" stroke=\"#444\" fill=\"none\">"
                   "<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\"/>"
                   "<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{0}\" y2=\"{3:.1f}\"/></g>\n",
                   kLeft, py(0.0), px(359.0), py(1.0));
  for (int a = 0; a <= 360; a += 45)
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" "
                     "text-anchor=\"middle\">{}</text>\n",
                     px(std::min(a, 359)), kH - kBottom + 14, a);
  for (int k = 0; k <= 4; ++k)
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" "
                     "text-anchor=\"end\">{:.2f}</text>\n",
                     kLeft - 6, py(k / 4.0) + 3, k / 4.0);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
                   "text-anchor=\"middle\">rotation angle (deg)</text>\n",
                   (kLeft + kW - kRight) / 2, kH - 6);

  std::string pts;
  for (int a = 0; a < kSignatureSize; ++a)
    pts += fmt::format("{}{:.2f},{:.2f}", a ? " " : "", px(a), py(f.signature[static_cast<std::size_t>(a)]));
  s += "<polyline class=\"signature\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
  for (const auto& p : f.peaks)
    s += fmt::format("<circle class=\"peak\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#c0392b\"/>\n", px(p.angle),
                     py(f.signature[static_cast<std::size_t>(p.angle)]));
  for (const auto& v : f.valleys)
    s += fmt::format("<circle class=\"valley\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"none\" stroke=\"#27ae60\" "
                     "stroke-width=\"1.5\"/>\n",
                     px(v.angle), py(f.signature[static_cast<std::size_t>(v.angle)]));
  s += "</svg>\n";
  return s;
}

}  // namespace firesig
