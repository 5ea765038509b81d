#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qhot/counting.hpp"
#include "qhot/physics.hpp"
#include "qhot/temporal.hpp"

namespace qhot {

// Shortest decimal form that parses back to the identical double. NaN and
// infinities are written as "nan"/"inf" and accepted back by parse_double.
std::string format_double(double value);

// Strict numeric parsing; context prefixes the error message.
double parse_double(const std::string& text, const std::string& context);
std::int64_t parse_int(const std::string& text, const std::string& context);

// Writes content to a sibling temp file and renames it over path, so readers
// never observe a partial file. Throws IoError naming the path on failure.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Minimal comma-separated table; none of the formats quote fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

// quadratures.csv: "sample_id,x", one filtered quadrature per row.
void write_quadratures(const std::string& path, std::span<const double> x);
std::vector<double> read_quadratures(const std::string& path);

// traces.csv: "trial_id,s0,...,s{n-1}", one homodyne record per row. The
// reader checks every row against grid.n_samples.
void write_traces(const std::string& path,
                  std::span<const HomodyneTrace> traces);
std::vector<HomodyneTrace> read_traces(const std::string& path,
                                       const TimeGrid& grid);

// clicks.csv: "trial_id,n2,n3,times2,times3"; the time columns hold
// semicolon-joined arrival bin indices and are empty for zero clicks.
void write_clicks(const std::string& path, std::span<const ClickRecord> records);
std::vector<ClickRecord> read_clicks(const std::string& path);

// decay.csv: "delay_s,efficiency".
void write_decay(const std::string& path, const DecayCurve& curve);
DecayCurve read_decay(const std::string& path);

}  // namespace qhot
