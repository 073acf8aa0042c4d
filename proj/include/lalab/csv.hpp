#pragma once

#include <string>
#include <vector>

namespace lalab::csv {

/// Locale-independent shortest round-trip representation of a double.
/// Keeps CSV output byte-stable for a given build.
std::string format_double(double v);

std::string format_int(long long v);

/// Joins cells with ',' and appends '\n'. Cells are written verbatim;
/// callers never emit cells containing commas or newlines.
std::string join_row(const std::vector<std::string>& cells);

std::vector<std::string> split_row(const std::string& line);

double parse_double(const std::string& cell);

/// One curve of a plot script: a gnuplot `using` expression plus style.
struct PlotSeries {
    std::string title;
    std::string using_expr; // e.g. "1:5:6", or an expression with strcol()
    std::string style;      // e.g. "with lines", "with yerrorbars"
};

/// Writes `<csv_path>.gnuplot` rendering the named series from the CSV.
/// Best effort: failures to open the script file are ignored.
void write_plot_script(const std::string& csv_path, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<PlotSeries>& series);

} // namespace lalab::csv
