#include "bootood/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "bootood/error.hpp"

namespace bootood {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

void write_step_histogram_svg(const std::filesystem::path& path, const std::string& title,
                              const std::string& x_label,
                              const std::vector<HistogramSeries>& series) {
    if (series.empty()) throw IoError("IOFailure: no histogram series to plot");

    const double width = 640, height = 420;
    const double ml = 60, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double x_lo = series.front().histogram.lo, x_hi = series.front().histogram.hi;
    double y_hi = 0.0;
    for (const auto& s : series) {
        x_lo = std::min(x_lo, s.histogram.lo);
        x_hi = std::max(x_hi, s.histogram.hi);
        const double total = std::max<double>(1.0, static_cast<double>(s.histogram.total()));
        const double bw = s.histogram.bin_width();
        for (std::size_t c : s.histogram.counts) {
            const double density = bw > 0.0 ? static_cast<double>(c) / (total * bw)
                                            : static_cast<double>(c) / total;
            y_hi = std::max(y_hi, density);
        }
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= 0.0) y_hi = 1.0;
    y_hi *= 1.05;

    auto sx = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto sy = [&](double y) { return mt + ph - y / y_hi * ph; };

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("IOFailure: cannot open '" + path.string() + "' for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
        << "font-family=\"sans-serif\">" << title << "</text>\n";

    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / 5.0;
        const double yv = y_hi * i / 5.0;
        out << "<line x1=\"" << sx(xv) << "\" y1=\"" << mt + ph << "\" x2=\"" << sx(xv)
            << "\" y2=\"" << mt + ph + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << sx(xv) << "\" y=\"" << mt + ph + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt(xv) << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << sy(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(yv)
            << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";

    for (const auto& s : series) {
        const Histogram& h = s.histogram;
        const double total = std::max<double>(1.0, static_cast<double>(h.total()));
        const double bw = h.bin_width();
        std::string points;
        points += fmt(sx(h.lo)) + "," + fmt(sy(0.0)) + " ";
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            const double density = bw > 0.0 ? static_cast<double>(h.counts[b]) / (total * bw)
                                            : static_cast<double>(h.counts[b]) / total;
            const double bl = h.lo + bw * static_cast<double>(b);
            points += fmt(sx(bl)) + "," + fmt(sy(density)) + " ";
            points += fmt(sx(bl + bw)) + "," + fmt(sy(density)) + " ";
        }
        points += fmt(sx(h.hi)) + "," + fmt(sy(0.0));
        out << "<polyline fill=\"" << s.color << "\" fill-opacity=\"0.25\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
    }

    // legend
    double ly = mt + 8;
    for (const auto& s : series) {
        out << "<rect x=\"" << ml + pw - 150 << "\" y=\"" << ly - 9
            << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\" fill-opacity=\"0.5\"/>\n";
        out << "<text x=\"" << ml + pw - 132 << "\" y=\"" << ly + 2
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        ly += 18;
    }
    out << "</svg>\n";
    if (!out) throw IoError("IOFailure: short write to '" + path.string() + "'");
}

void write_histogram_csv(const std::filesystem::path& path,
                         const std::vector<HistogramSeries>& series) {
    if (series.empty()) throw IoError("IOFailure: no histogram series to write");
    const std::size_t bins = series.front().histogram.counts.size();
    for (const auto& s : series) {
        if (s.histogram.counts.size() != bins) {
            throw IoError("DimMismatch: histogram series have different bin counts");
        }
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("IOFailure: cannot open '" + path.string() + "' for writing");
    out << "bin_lo,bin_hi";
    for (const auto& s : series) out << ',' << s.label;
    out << '\n';
    char buf[64];
    for (std::size_t b = 0; b < bins; ++b) {
        const Histogram& first = series.front().histogram;
        const double lo = first.lo + first.bin_width() * static_cast<double>(b);
        const double hi = lo + first.bin_width();
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", lo, hi);
        out << buf;
        for (const auto& s : series) out << ',' << s.histogram.counts[b];
        out << '\n';
    }
    if (!out) throw IoError("IOFailure: short write to '" + path.string() + "'");
}

} // namespace bootood
