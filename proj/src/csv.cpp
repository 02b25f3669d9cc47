#include "dscp/csv.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace dscp {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace and a trailing CR from Windows files
        std::size_t lo = cell.find_first_not_of(" \t\r");
        std::size_t hi = cell.find_last_not_of(" \t\r");
        cells.push_back(lo == std::string::npos ? std::string() : cell.substr(lo, hi - lo + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& text, std::size_t line_no) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + text + "'");
    }
    return v;
}

std::int64_t parse_int(const std::string& text, std::size_t line_no) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + text + "'");
    }
    return static_cast<std::int64_t>(v);
}

}  // namespace

std::int64_t parse_iso8601(const std::string& text) {
    std::tm tm{};
    int y, mo, d, h, mi, s;
    char sep;
    if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s) != 7 ||
        (sep != 'T' && sep != ' ')) {
        throw ParseError("bad ISO-8601 timestamp '" + text + "'");
    }
    if (!text.empty() && text.back() != 'Z' && !std::isdigit(static_cast<unsigned char>(text.back()))) {
        throw ParseError("bad ISO-8601 timestamp '" + text + "'");
    }
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    const std::time_t t = timegm(&tm);
    if (t == static_cast<std::time_t>(-1)) {
        throw ParseError("out-of-range timestamp '" + text + "'");
    }
    return static_cast<std::int64_t>(t);
}

SeriesFrame read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + path + "' is empty");
    const auto header = split_row(line);

    int t_col = -1, y_col = -1;
    bool iso_time = false;
    std::vector<int> f_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "t") {
            t_col = static_cast<int>(i);
        } else if (header[i] == "timestamp") {
            t_col = static_cast<int>(i);
            iso_time = true;
        } else if (header[i] == "y") {
            y_col = static_cast<int>(i);
        } else if (header[i].size() > 1 && header[i][0] == 'f') {
            f_cols.push_back(static_cast<int>(i));
        } else {
            throw ParseError("unknown column '" + header[i] + "' in '" + path + "'");
        }
    }
    if (t_col < 0) throw ParseError("'" + path + "' lacks a t/timestamp column");
    if (y_col < 0) throw ParseError("'" + path + "' lacks a y column");

    std::vector<std::int64_t> times;
    std::vector<double> targets;
    std::vector<std::vector<double>> feats;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        }
        times.push_back(iso_time ? parse_iso8601(cells[t_col]) : parse_int(cells[t_col], line_no));
        targets.push_back(parse_double(cells[y_col], line_no));
        std::vector<double> row;
        row.reserve(f_cols.size());
        for (int c : f_cols) row.push_back(parse_double(cells[c], line_no));
        feats.push_back(std::move(row));
    }
    if (targets.empty()) throw ParseError("'" + path + "' has no data rows");

    SeriesFrame frame;
    frame.timestamps = std::move(times);
    frame.stride = frame.timestamps.size() > 1 ? frame.timestamps[1] - frame.timestamps[0] : 1;
    frame.target = Eigen::Map<const Eigen::VectorXd>(targets.data(), targets.size());
    if (!f_cols.empty()) {
        frame.features.resize(static_cast<Eigen::Index>(feats.size()),
                              static_cast<Eigen::Index>(f_cols.size()));
        for (std::size_t r = 0; r < feats.size(); ++r)
            for (std::size_t c = 0; c < f_cols.size(); ++c)
                frame.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = feats[r][c];
    }
    validate_frame(frame);
    return frame;
}

void write_series_csv(const SeriesFrame& frame, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "t,y";
    for (Eigen::Index c = 0; c < frame.features.cols(); ++c) out << ",f" << (c + 1);
    out << "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < frame.size(); ++i) {
        out << frame.timestamps[i];
        std::snprintf(buf, sizeof(buf), "%.10g", frame.target[i]);
        out << ',' << buf;
        for (Eigen::Index c = 0; c < frame.features.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.10g", frame.features(i, c));
            out << ',' << buf;
        }
        out << "\n";
    }
}

}  // namespace dscp
