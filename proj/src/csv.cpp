#include "lalab/csv.hpp"

#include "lalab/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

namespace lalab::csv {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_int(long long v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r' && c != '\n') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_double(const std::string& cell) {
    double v = 0.0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw ConfigError("not a number: '" + cell + "'");
    return v;
}

void write_plot_script(const std::string& csv_path, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<PlotSeries>& series) {
    std::ofstream out(csv_path + ".gnuplot");
    if (!out) return;
    out << "# gnuplot script for " << csv_path << "\n";
    out << "set datafile separator ','\n";
    out << "set key autotitle columnhead\n";
    out << "set xlabel '" << xlabel << "'\n";
    out << "set ylabel '" << ylabel << "'\n";
    bool first = true;
    for (const auto& s : series) {
        out << (first ? "plot " : ",\\\n     ");
        out << "'" << csv_path << "' using " << s.using_expr << " " << s.style << " title '"
            << s.title << "'";
        first = false;
    }
    out << "\n";
}

} // namespace lalab::csv
