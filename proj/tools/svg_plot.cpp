#include "svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace parvar::cli {

namespace {

constexpr double kWidth = 480;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 20;
constexpr double kBottom = 60;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '-':
            // keep "--" out of XML comments
            out += (!out.empty() && out.back() == '-') ? " -" : "-";
            break;
        default: out += c;
        }
    }
    return out;
}

std::pair<double, double> extent(const std::vector<std::pair<double, double>>& pts, bool first)
{
    if (pts.empty()) {
        return {0.0, 1.0};
    }
    double lo = first ? pts[0].first : pts[0].second;
    double hi = lo;
    for (const auto& p : pts) {
        double v = first ? p.first : p.second;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double pad = hi > lo ? 0.05 * (hi - lo) : std::max(0.5, 0.05 * std::abs(lo));
    return {lo - pad, hi + pad};
}

} // namespace

std::string scatter_svg(const std::vector<std::pair<double, double>>& points, const std::string& x_label,
                        const std::string& y_label, const std::vector<std::string>& metadata)
{
    auto [x0, x1] = extent(points, true);
    auto [y0, y1] = extent(points, false);
    double pw = kWidth - kLeft - kRight;
    double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<!--\n";
    for (const auto& m : metadata) {
        os << escape(m) << '\n';
    }
    os << "-->\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double fx = x0 + (x1 - x0) * i / 4.0;
        double fy = y0 + (y1 - y0) * i / 4.0;
        os << "<line x1=\"" << num(px(fx)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px(fx)) << "\" y2=\""
           << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
           << tick(fx) << "</text>\n";
        os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(fy)) << "\" x2=\"" << num(kLeft) << "\" y2=\""
           << num(py(fy)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(fy) + 4) << "\" text-anchor=\"end\">" << tick(fy)
           << "</text>\n";
    }
    os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\">"
       << escape(x_label) << "</text>\n";
    os << "<text x=\"15\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
       << num(kTop + ph / 2) << ")\">" << escape(y_label) << "</text>\n";
    for (const auto& [x, y] : points) {
        os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace parvar::cli
