#include "cloudcast/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cloudcast/error.hpp"

namespace cloudcast {

namespace {

std::string format_lead(double minutes) {
    char buf[32];
    if (std::abs(minutes - std::round(minutes)) < 1e-9) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(minutes)));
    } else {
        std::snprintf(buf, sizeof buf, "%.6g", minutes);
    }
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string report_csv(const AccuracyReport& report) {
    std::string out = "lead_minutes,accuracy,n_frames\n";
    char buf[64];
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof buf, ",%.6f,%d\n", row.accuracy, row.n_frames);
        out += format_lead(row.lead_minutes);
        out += buf;
    }
    return out;
}

std::string report_svg(const AccuracyReport& report) {
    constexpr double W = 640, H = 400;
    constexpr double left = 70, right = 20, top = 40, bottom = 60;
    const double pw = W - left - right;
    const double ph = H - top - bottom;

    const double max_lead = report.rows.empty() ? 1.0 : report.rows.back().lead_minutes;
    double lo = 100.0;
    for (const auto& row : report.rows) lo = std::min(lo, row.accuracy * 100.0);
    // Percent axis from a multiple of 10 below the lowest point up to 100.
    const double y0 = std::clamp(std::floor((lo - 1e-9) / 10.0) * 10.0, 0.0, 90.0);
    auto px = [&](double lead) { return left + pw * lead / max_lead; };
    auto py = [&](double pct) { return top + ph * (100.0 - pct) / (100.0 - y0); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\">\n";
    s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">Prediction accuracy vs lead time (" + report.method + ")</text>\n";
    s += "<g stroke=\"black\" stroke-width=\"1\">\n";
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(left + pw) +
         "\" y2=\"" + num(top + ph) + "\"/>\n";
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) +
         "\" y2=\"" + num(top + ph) + "\"/>\n";
    s += "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (const auto& row : report.rows) {
        s += "<text x=\"" + num(px(row.lead_minutes)) + "\" y=\"" + num(top + ph + 18) +
             "\" text-anchor=\"middle\">" + format_lead(row.lead_minutes) + "</text>\n";
    }
    for (double pct = y0; pct <= 100.0 + 1e-9; pct += 10.0) {
        s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py(pct) + 4) +
             "\" text-anchor=\"end\">" + format_lead(pct) + "</text>\n";
    }
    s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(H - 16) +
         "\" text-anchor=\"middle\">Lead time (minutes)</text>\n";
    s += "<text x=\"18\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(top + ph / 2) + ")\">Accuracy (%)</text>\n";
    s += "</g>\n";
    s += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        if (i) s += ' ';
        s += num(px(report.rows[i].lead_minutes)) + "," + num(py(report.rows[i].accuracy * 100.0));
    }
    s += "\"/>\n</svg>\n";
    return s;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace cloudcast
