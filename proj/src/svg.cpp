#include "cbdcnk/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cbdcnk {

namespace {

const char* kLineColors[] = {"#1f6fb4", "#d43d2a", "#2b8a3e", "#8a2be2"};

std::vector<std::string> default_panels() {
  return {"y",     "c",     "l",     "pi",   "I_gross", "R_bond", "chi_r",
          "chi_n", "chi_m", "chi_z", "z",    "m",       "n",      "m_over_n"};
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

std::string overlay_svg(const IrfOverlay& overlay, std::vector<std::string> panels) {
  if (panels.empty()) panels = default_panels();
  const int cols = 4;
  const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
  const double pw = 230, ph = 160, margin = 36, gap = 18;
  const double width = cols * (pw + gap) + margin * 2;
  const double height = rows * (ph + gap) + margin * 2;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (size_t pi = 0; pi < panels.size(); ++pi) {
    int col_idx = -1;
    for (size_t j = 0; j < overlay.columns.size(); ++j)
      if (overlay.columns[j] == panels[pi]) col_idx = static_cast<int>(j);
    if (col_idx < 0) continue;
    const double x0 = margin + (pi % cols) * (pw + gap);
    const double y0 = margin + (pi / cols) * (ph + gap);

    double lo = 0.0, hi = 0.0;
    for (const Eigen::MatrixXd& block : overlay.display) {
      lo = std::min(lo, block.col(col_idx).minCoeff());
      hi = std::max(hi, block.col(col_idx).maxCoeff());
    }
    if (hi - lo < 1e-12) {
      hi += 1e-12;
      lo -= 1e-12;
    }
    double pad = 0.08 * (hi - lo);
    lo -= pad;
    hi += pad;

    auto xmap = [&](int t) { return x0 + pw * t / std::max(1, overlay.horizon); };
    auto ymap = [&](double v) { return y0 + ph - ph * (v - lo) / (hi - lo); };

    os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#999\"/>\n";
    if (lo < 0.0 && hi > 0.0)
      os << "<line x1=\"" << x0 << "\" y1=\"" << ymap(0.0) << "\" x2=\"" << x0 + pw << "\" y2=\""
         << ymap(0.0) << "\" stroke=\"#ccc\"/>\n";
    os << "<text x=\"" << x0 + 4 << "\" y=\"" << y0 + 13 << "\">" << panels[pi] << "</text>\n";

    for (size_t r = 0; r < overlay.display.size(); ++r) {
      const Eigen::MatrixXd& block = overlay.display[r];
      os << "<polyline fill=\"none\" stroke=\"" << kLineColors[r % 4] << "\" stroke-width=\"1.4\""
         << (r % 2 == 1 ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
      for (int t = 0; t <= overlay.horizon; ++t)
        os << fmt(xmap(t)) << "," << fmt(ymap(block(t, col_idx))) << " ";
      os << "\"/>\n";
    }
  }

  // Legend.
  for (size_t r = 0; r < overlay.labels.size(); ++r) {
    double lx = margin + r * 190.0;
    os << "<line x1=\"" << lx << "\" y1=\"" << height - 14 << "\" x2=\"" << lx + 26 << "\" y2=\""
       << height - 14 << "\" stroke=\"" << kLineColors[r % 4] << "\" stroke-width=\"2\""
       << (r % 2 == 1 ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    os << "<text x=\"" << lx + 32 << "\" y=\"" << height - 10 << "\">" << overlay.labels[r]
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace cbdcnk
