#include "budgetsvm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

namespace budgetsvm {

namespace {

struct Series {
    const char* label;
    const char* color;
    std::vector<double> values;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

void panel(std::ostream& out, double x0, double y0, double w, double h, const std::string& title,
           const std::vector<double>& xs, const std::vector<Series>& series) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series)
        for (double v : s.values)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double xmin = xs.empty() ? 0.0 : xs.front();
    const double xmax = xs.empty() || xs.back() == xmin ? xmin + 1.0 : xs.back();
    auto px = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * w; };
    auto py = [&](double y) { return y0 + h - (y - lo) / (hi - lo) * h; };

    out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << w << "\" height=\"" << h
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << x0 << "\" y=\"" << y0 - 8 << "\" font-size=\"13\">" << escape(title) << "</text>\n";
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << y0 + 4 << "\" font-size=\"10\" text-anchor=\"end\">"
        << num(hi) << "</text>\n";
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << y0 + h << "\" font-size=\"10\" text-anchor=\"end\">"
        << num(lo) << "</text>\n";
    out << "<text x=\"" << x0 << "\" y=\"" << y0 + h + 14 << "\" font-size=\"10\">" << num(xmin) << "</text>\n";
    out << "<text x=\"" << x0 + w << "\" y=\"" << y0 + h + 14
        << "\" font-size=\"10\" text-anchor=\"end\">epoch " << num(xmax) << "</text>\n";

    int legend = 0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < xs.size() && k < s.values.size(); ++k)
            if (std::isfinite(s.values[k])) out << num(px(xs[k])) << ',' << num(py(s.values[k])) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << x0 + w - 4 << "\" y=\"" << y0 + 14 + 14 * legend
            << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << s.color << "\">" << s.label << "</text>\n";
        ++legend;
    }
}

}  // namespace

void write_svg_plot(std::span<const EpochRecord> records, const std::string& title, std::ostream& out) {
    std::vector<double> xs;
    Series primal{"primal", "#c0392b", {}};
    Series dual{"dual", "#2471a3", {}};
    Series acc{"test accuracy", "#1e8449", {}};
    for (const auto& r : records) {
        xs.push_back(static_cast<double>(r.epoch));
        primal.values.push_back(r.primal_obj);
        dual.values.push_back(r.dual_obj);
        acc.values.push_back(r.test_accuracy);
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"380\" "
           "font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"450\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" << escape(title) << "</text>\n";
    panel(out, 70, 60, 340, 270, "objective", xs, {primal, dual});
    panel(out, 520, 60, 340, 270, "test accuracy", xs, {acc});
    out << "</svg>\n";
}

}  // namespace budgetsvm
