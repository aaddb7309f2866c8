#include <algorithm>
#include <cmath>
#include <sstream>

#include "sklab/lab/experiment.hpp"

namespace sklab::lab {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 55.0;

std::string escape(const std::string& s) {
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

std::string num(double v) {
    std::ostringstream os;
    os.precision(5);
    os << v;
    return os.str();
}

double nice_step(double span) {
    double raw = span / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double f = raw / mag;
    return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace

std::string render_svg(const Plot& plot) {
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    auto extend = [](double v, double& lo, double& hi) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    for (double v : plot.curve_x) extend(v, xlo, xhi);
    for (double v : plot.point_x) extend(v, xlo, xhi);
    for (double v : plot.curve_y) extend(v, ylo, yhi);
    for (std::size_t i = 0; i < plot.point_y.size(); ++i) {
        double e = i < plot.point_err.size() ? plot.point_err[i] : 0.0;
        extend(plot.point_y[i] - e, ylo, yhi);
        extend(plot.point_y[i] + e, ylo, yhi);
    }
    if (!(xhi > xlo)) { xlo -= 1.0; xhi += 1.0; }
    if (!(yhi > ylo)) { ylo -= 1.0; yhi += 1.0; }
    double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * pw; };
    auto sy = [&](double y) { return kTop + (yhi - y) / (yhi - ylo) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
      << "</text>\n";
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    double xs = nice_step(xhi - xlo), ys = nice_step(yhi - ylo);
    for (double x = std::ceil(xlo / xs) * xs; x <= xhi + 1e-12 * xs; x += xs) {
        double px = sx(x);
        o << "<line x1=\"" << px << "\" y1=\"" << kTop + ph << "\" x2=\"" << px << "\" y2=\"" << kTop + ph + 5
          << "\" stroke=\"black\"/><text x=\"" << px << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
          << num(std::abs(x) < 1e-12 * xs ? 0.0 : x) << "</text>\n";
    }
    for (double y = std::ceil(ylo / ys) * ys; y <= yhi + 1e-12 * ys; y += ys) {
        double py = sy(y);
        o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\"" << py
          << "\" stroke=\"black\"/><text x=\"" << kLeft - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
          << num(std::abs(y) < 1e-12 * ys ? 0.0 : y) << "</text>\n";
    }
    o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(plot.xlabel) << "</text>\n";
    o << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(plot.ylabel) << "</text>\n";

    if (!plot.curve_x.empty()) {
        o << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < plot.curve_x.size() && i < plot.curve_y.size(); ++i) {
            if (!std::isfinite(plot.curve_y[i])) continue;
            o << num(sx(plot.curve_x[i])) << ',' << num(sy(plot.curve_y[i])) << ' ';
        }
        o << "\"/>\n";
    }
    for (std::size_t i = 0; i < plot.point_x.size() && i < plot.point_y.size(); ++i) {
        double px = sx(plot.point_x[i]), py = sy(plot.point_y[i]);
        if (!std::isfinite(px) || !std::isfinite(py)) continue;
        double e = i < plot.point_err.size() ? plot.point_err[i] : 0.0;
        if (e > 0.0) {
            o << "<line x1=\"" << num(px) << "\" y1=\"" << num(sy(plot.point_y[i] - e)) << "\" x2=\"" << num(px)
              << "\" y2=\"" << num(sy(plot.point_y[i] + e)) << "\" stroke=\"#2c3e50\"/>\n";
        }
        o << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"2.5\" fill=\"#2c3e50\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace sklab::lab
