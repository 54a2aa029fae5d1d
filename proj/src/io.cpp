#include "fbc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fbc {

uint64_t fnv1a64(const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& schema_name,
                     int schema_version, const std::vector<std::string>& columns)
    : path_(path), n_cols_(columns.size()) {
    if (columns.empty()) throw std::invalid_argument("CsvWriter: no columns");
    out_.open(path, std::ios::binary); // binary keeps LF endings everywhere
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    out_ << "# schema: " << schema_name << " v" << schema_version << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != n_cols_)
        throw std::invalid_argument("CsvWriter: row width mismatch in " + path_);
    for (size_t i = 0; i < values.size(); ++i)
        out_ << format_g17(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_cells(const std::vector<std::string>& cells) {
    if (cells.size() != n_cols_)
        throw std::invalid_argument("CsvWriter: row width mismatch in " + path_);
    for (size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

void CsvWriter::close() {
    if (out_.is_open()) out_.close();
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    char hash_buf[24];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    j["config_hash"] = hash_buf;
    j["base_seed"] = base_seed;
    j["parameters"] = parameters;
    j["module_versions"] = module_versions;
    j["outputs"] = outputs;
    j["timing"] = {{"wall_seconds", wall_seconds}, {"threads", threads}};
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("RunManifest: cannot open " + path);
    out << to_json();
}

namespace {

double axis_map(double v, bool log_axis) {
    if (!log_axis) return v;
    return std::log10(std::max(v, 1e-300));
}

} // namespace

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::vector<double>& xs,
                     const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& labels, bool log_x, bool log_y) {
    if (series.empty() || xs.size() < 2)
        throw std::invalid_argument("write_svg_lines: need >= 2 points and >= 1 series");
    for (const auto& s : series)
        if (s.size() != xs.size())
            throw std::invalid_argument("write_svg_lines: series length mismatch");
    const int W = 640, Hgt = 420, ml = 60, mr = 20, mt = 40, mb = 40;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (double v : xs) {
        double m = axis_map(v, log_x);
        x_lo = std::min(x_lo, m);
        x_hi = std::max(x_hi, m);
    }
    for (const auto& s : series)
        for (double v : s) {
            double m = axis_map(v, log_y);
            y_lo = std::min(y_lo, m);
            y_hi = std::max(y_hi, m);
        }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    auto px = [&](double v) {
        return ml + (axis_map(v, log_x) - x_lo) / (x_hi - x_lo) * (W - ml - mr);
    };
    auto py = [&](double v) {
        return Hgt - mb - (axis_map(v, log_y) - y_lo) / (y_hi - y_lo) * (Hgt - mt - mb);
    };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << Hgt << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << title << "</text>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << Hgt - mb << "\" x2=\"" << W - mr
        << "\" y2=\"" << Hgt - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << Hgt - mb << "\" stroke=\"black\"/>\n";
    for (size_t s = 0; s < series.size(); ++s) {
        svg << "<polyline fill=\"none\" stroke=\"" << colors[s % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < xs.size(); ++i)
            svg << px(xs[i]) << "," << py(series[s][i]) << " ";
        svg << "\"/>\n";
        if (s < labels.size())
            svg << "<text x=\"" << W - mr - 150 << "\" y=\"" << mt + 16 * (s + 1)
                << "\" font-size=\"12\" fill=\"" << colors[s % 8] << "\">" << labels[s]
                << "</text>\n";
    }
    svg << "</svg>\n";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_svg_lines: cannot open " + path);
    out << svg.str();
}

} // namespace fbc
