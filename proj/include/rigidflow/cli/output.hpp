#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigidflow/cli/config.hpp"

namespace rigidflow::cli {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// RIGIDFLOW_OUTPUT_DIR overrides the configured directory
inline fs::path output_root(const std::string& configured) {
    if (const char* e = std::getenv("RIGIDFLOW_OUTPUT_DIR"); e && *e) return fs::path(e);
    return fs::path(configured);
}

// ---------------------------------------------------------------------------
// CSV, every double at 17 significant digits; rows are flushed as written so
// an interrupted sweep keeps what it finished.

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
        out_.flush();
        cols_ = header.size();
    }
    void row(const std::vector<double>& v) {
        if (v.size() != cols_) throw std::invalid_argument("csv: row width differs from the header");
        for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << fmt17(v[i]);
        out_ << "\n";
        out_.flush();
    }
    // leading text cell, then numbers
    void row(const std::string& label, const std::vector<double>& v) {
        if (v.size() + 1 != cols_) throw std::invalid_argument("csv: row width differs from the header");
        out_ << label;
        for (double x : v) out_ << "," << fmt17(x);
        out_ << "\n";
        out_.flush();
    }

private:
    std::ofstream out_;
    std::size_t cols_ = 0;
};

// NaN and infinities are not JSON numbers
inline Json num(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

inline void write_json(const fs::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Checkpoint: "RGFLOW01", u64 LE header length, UTF-8 JSON header, then the
// arrays listed in the header as contiguous LE doubles.

struct CheckpointArray {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> data;
};

struct Checkpoint {
    Json meta = Json::object();
    std::vector<CheckpointArray> arrays;

    const CheckpointArray& array(const std::string& name) const {
        for (const auto& a : arrays)
            if (a.name == name) return a;
        throw std::out_of_range("checkpoint: no array '" + name + "'");
    }
};

namespace detail {
inline void put_u64(std::ostream& o, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    o.write(reinterpret_cast<const char*>(b), 8);
}
inline std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("checkpoint: truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
inline void put_f64(std::ostream& o, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(o, v);
}
inline double get_f64(std::istream& in) {
    std::uint64_t v = get_u64(in);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}
}  // namespace detail

inline constexpr char kCheckpointMagic[9] = "RGFLOW01";

inline void write_checkpoint(const fs::path& path, const Checkpoint& c) {
    Json h;
    h["meta"] = c.meta;
    h["arrays"] = Json::array();
    for (const auto& a : c.arrays) {
        std::size_t n = 1;
        for (auto s : a.shape) n *= s;
        if (n != a.data.size()) throw std::invalid_argument("checkpoint: array '" + a.name + "' shape does not match data");
        h["arrays"].push_back({{"name", a.name}, {"shape", a.shape}});
    }
    std::string header = h.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(kCheckpointMagic, 8);
    detail::put_u64(out, header.size());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& a : c.arrays)
        for (double d : a.data) detail::put_f64(out, d);
}

inline Checkpoint read_checkpoint(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    std::uint64_t len = detail::get_u64(in);
    if (len > (1ull << 32)) throw std::runtime_error("checkpoint: implausible header length");
    std::string header(len, '\0');
    if (!in.read(header.data(), static_cast<std::streamsize>(len))) throw std::runtime_error("checkpoint: truncated header");
    Json h = Json::parse(header);
    Checkpoint c;
    c.meta = h.at("meta");
    for (const auto& a : h.at("arrays")) {
        CheckpointArray arr;
        arr.name = a.at("name").get<std::string>();
        arr.shape = a.at("shape").get<std::vector<std::size_t>>();
        std::size_t n = 1;
        for (auto s : arr.shape) n *= s;
        arr.data.resize(n);
        for (auto& d : arr.data) d = detail::get_f64(in);
        c.arrays.push_back(std::move(arr));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("checkpoint: trailing bytes");
    return c;
}

// ---------------------------------------------------------------------------
// Log-log SVG of one or more series against a parameter, with the fitted
// slope written in the legend.

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    double slope = std::numeric_limits<double>::quiet_NaN();
};

inline void write_loglog_svg(const fs::path& path, const std::string& title, const std::string& xlabel,
                             const std::string& ylabel, const std::vector<PlotSeries>& series) {
    const double W = 640, H = 440, L = 80, R = 200, Tm = 40, B = 60;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
            x0 = std::min(x0, std::log10(s.x[i]));
            x1 = std::max(x1, std::log10(s.x[i]));
            y0 = std::min(y0, std::log10(s.y[i]));
            y1 = std::max(y1, std::log10(s.y[i]));
        }
    if (!(x1 >= x0)) x0 = 0, x1 = 1;
    if (!(y1 >= y0)) y0 = 0, y1 = 1;
    x0 = std::floor(x0), x1 = std::max(std::ceil(x1), x0 + 1);
    y0 = std::floor(y0), y1 = std::max(std::ceil(y1), y0 + 1);
    auto px = [&](double v) { return L + (std::log10(v) - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (std::log10(v) - y0) / (y1 - y0) * (H - Tm - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream o;
    o.precision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    for (double e = x0; e <= x1 + 1e-9; e += 1) {
        double X = L + (e - x0) / (x1 - x0) * (W - L - R);
        o << "<line x1=\"" << X << "\" y1=\"" << Tm << "\" x2=\"" << X << "\" y2=\"" << H - B
          << "\" stroke=\"#ddd\"/>\n<text x=\"" << X << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">1e"
          << e << "</text>\n";
    }
    for (double e = y0; e <= y1 + 1e-9; e += 1) {
        double Y = H - B - (e - y0) / (y1 - y0) * (H - Tm - B);
        o << "<line x1=\"" << L << "\" y1=\"" << Y << "\" x2=\"" << W - R << "\" y2=\"" << Y
          << "\" stroke=\"#ddd\"/>\n<text x=\"" << L - 6 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\" font-size=\"11\">1e"
          << e << "</text>\n";
    }
    o << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\"" << H - Tm - B
      << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n"
      << "<text x=\"18\" y=\"" << (Tm + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << (Tm + H - B) / 2 << ")\">" << ylabel << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 6];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
            std::ostringstream p;
            p.precision(6);
            p << px(s.x[i]) << "," << py(s.y[i]) << " ";
            pts += p.str();
            o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3.5\" fill=\"" << c << "\"/>\n";
        }
        o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << c << "\"/>\n";
        double ly = Tm + 16 + 18 * k;
        o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << c << "\"/>\n<text x=\"" << W - R + 35 << "\" y=\"" << ly << "\" font-size=\"11\">" << s.label;
        if (std::isfinite(s.slope)) o << " (slope " << s.slope << ")";
        o << "</text>\n";
    }
    o << "</svg>\n";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << o.str();
}

}  // namespace rigidflow::cli
