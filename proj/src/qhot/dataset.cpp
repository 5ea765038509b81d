#include "qhot/dataset.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <system_error>
#include <utility>

#include "qhot/errors.hpp"

namespace qhot {

namespace {

std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(delim, start);
    if (pos == std::string::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

// Yields each data line with its 1-based line number after checking the
// header, tolerating a trailing newline and CR line endings.
template <typename Fn>
void for_each_row(const std::string& path, const std::string& expected_header,
                  Fn&& fn) {
  const std::string content = read_file(path);
  std::size_t start = 0;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    const bool last = end == content.size();
    if (!saw_header) {
      if (line.empty() && last) break;
      if (line != expected_header) {
        throw IoError(path + ": unexpected header \"" + line + "\"");
      }
      saw_header = true;
    } else if (!line.empty()) {
      fn(line_no, line);
    } else if (!last) {
      throw IoError(path + ":" + std::to_string(line_no) + ": blank line");
    }
    if (last) break;
    start = end + 1;
  }
  if (!saw_header) {
    throw IoError(path + ": empty file, expected header \"" + expected_header +
                  "\"");
  }
}

std::string row_context(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

std::vector<std::int32_t> parse_bins(const std::string& field,
                                     const std::string& context) {
  std::vector<std::int32_t> bins;
  if (field.empty()) return bins;
  for (const std::string& piece : split(field, ';')) {
    const std::int64_t value = parse_int(piece, context);
    if (value < std::numeric_limits<std::int32_t>::min() ||
        value > std::numeric_limits<std::int32_t>::max()) {
      throw IoError(context + ": arrival bin out of range: " + piece);
    }
    bins.push_back(static_cast<std::int32_t>(value));
  }
  return bins;
}

void append_bins(std::string& out, std::span<const std::int32_t> bins) {
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(bins[i]);
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end || text.empty()) {
    throw IoError(context + ": not a number: \"" + text + "\"");
  }
  return value;
}

std::int64_t parse_int(const std::string& text, const std::string& context) {
  std::int64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end || text.empty()) {
    throw IoError(context + ": not an integer: \"" + text + "\"");
  }
  return value;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open for writing: " + tmp);
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed: " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot replace " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file: " + path);
  }
  std::string content;
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size > 0) {
    content.resize(static_cast<std::size_t>(size));
    in.seekg(0, std::ios::beg);
    in.read(content.data(), size);
  }
  if (in.bad()) {
    throw IoError("read failed: " + path);
  }
  return content;
}

CsvTable read_csv(const std::string& path) {
  const std::string content = read_file(path);
  CsvTable table;
  std::size_t start = 0;
  bool saw_header = false;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool last = end == content.size();
    if (!saw_header) {
      if (!line.empty()) {
        table.header = split(line, ',');
        saw_header = true;
      } else if (last) {
        throw IoError(path + ": empty file");
      }
    } else if (!line.empty()) {
      auto fields = split(line, ',');
      if (fields.size() != table.header.size()) {
        throw IoError(path + ": row with " + std::to_string(fields.size()) +
                      " fields, header has " +
                      std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(fields));
    }
    if (last) break;
    start = end + 1;
  }
  if (!saw_header) {
    throw IoError(path + ": empty file");
  }
  return table;
}

void write_quadratures(const std::string& path, std::span<const double> x) {
  std::string out = "sample_id,x\n";
  out.reserve(out.size() + x.size() * 24);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(x[i]);
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<double> read_quadratures(const std::string& path) {
  std::vector<double> x;
  for_each_row(path, "sample_id,x", [&](std::size_t line_no,
                                        const std::string& line) {
    const auto fields = split(line, ',');
    const std::string context = row_context(path, line_no);
    if (fields.size() != 2) {
      throw IoError(context + ": expected 2 fields, got " +
                    std::to_string(fields.size()));
    }
    const std::int64_t id = parse_int(fields[0], context);
    if (id != static_cast<std::int64_t>(x.size())) {
      throw IoError(context + ": sample_id out of order: " + fields[0]);
    }
    x.push_back(parse_double(fields[1], context));
  });
  return x;
}

namespace {

std::string trace_header(int n_samples) {
  std::string header = "trial_id";
  for (int i = 0; i < n_samples; ++i) {
    header += ",s";
    header += std::to_string(i);
  }
  return header;
}

}  // namespace

void write_traces(const std::string& path,
                  std::span<const HomodyneTrace> traces) {
  const int n_samples = traces.empty() ? 0 : traces.front().grid.n_samples;
  std::string out = trace_header(n_samples);
  out += '\n';
  out.reserve(out.size() + traces.size() * (n_samples + 1) * 24);
  for (const HomodyneTrace& trace : traces) {
    trace.validate();
    if (trace.grid.n_samples != n_samples) {
      throw std::invalid_argument("traces must share one grid");
    }
    out += std::to_string(trace.trial_id);
    for (double s : trace.samples) {
      out += ',';
      out += format_double(s);
    }
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<HomodyneTrace> read_traces(const std::string& path,
                                       const TimeGrid& grid) {
  grid.validate();
  std::vector<HomodyneTrace> traces;
  const std::size_t n_fields = static_cast<std::size_t>(grid.n_samples) + 1;
  for_each_row(path, trace_header(grid.n_samples),
               [&](std::size_t line_no, const std::string& line) {
                 const auto fields = split(line, ',');
                 const std::string context = row_context(path, line_no);
                 if (fields.size() != n_fields) {
                   throw IoError(context + ": expected " +
                                 std::to_string(n_fields) + " fields, got " +
                                 std::to_string(fields.size()));
                 }
                 HomodyneTrace trace;
                 trace.grid = grid;
                 trace.trial_id = parse_int(fields[0], context);
                 trace.samples.reserve(grid.n_samples);
                 for (std::size_t i = 1; i < fields.size(); ++i) {
                   trace.samples.push_back(parse_double(fields[i], context));
                 }
                 traces.push_back(std::move(trace));
               });
  return traces;
}

void write_clicks(const std::string& path,
                  std::span<const ClickRecord> records) {
  std::string out = "trial_id,n2,n3,times2,times3\n";
  out.reserve(out.size() + records.size() * 16);
  for (const ClickRecord& record : records) {
    record.validate();
    out += std::to_string(record.trial_id);
    out += ',';
    out += std::to_string(record.n2);
    out += ',';
    out += std::to_string(record.n3);
    out += ',';
    append_bins(out, record.times2);
    out += ',';
    append_bins(out, record.times3);
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<ClickRecord> read_clicks(const std::string& path) {
  std::vector<ClickRecord> records;
  for_each_row(path, "trial_id,n2,n3,times2,times3",
               [&](std::size_t line_no, const std::string& line) {
                 const auto fields = split(line, ',');
                 const std::string context = row_context(path, line_no);
                 if (fields.size() != 5) {
                   throw IoError(context + ": expected 5 fields, got " +
                                 std::to_string(fields.size()));
                 }
                 ClickRecord record;
                 record.trial_id = parse_int(fields[0], context);
                 record.n2 = static_cast<int>(parse_int(fields[1], context));
                 record.n3 = static_cast<int>(parse_int(fields[2], context));
                 record.times2 = parse_bins(fields[3], context);
                 record.times3 = parse_bins(fields[4], context);
                 try {
                   record.validate();
                 } catch (const std::exception& err) {
                   throw IoError(context + ": " + err.what());
                 }
                 records.push_back(std::move(record));
               });
  return records;
}

void write_decay(const std::string& path, const DecayCurve& curve) {
  curve.validate();
  std::string out = "delay_s,efficiency\n";
  for (std::size_t i = 0; i < curve.delays.size(); ++i) {
    out += format_double(curve.delays[i]);
    out += ',';
    out += format_double(curve.efficiencies[i]);
    out += '\n';
  }
  atomic_write_file(path, out);
}

DecayCurve read_decay(const std::string& path) {
  DecayCurve curve;
  for_each_row(path, "delay_s,efficiency",
               [&](std::size_t line_no, const std::string& line) {
                 const auto fields = split(line, ',');
                 const std::string context = row_context(path, line_no);
                 if (fields.size() != 2) {
                   throw IoError(context + ": expected 2 fields, got " +
                                 std::to_string(fields.size()));
                 }
                 curve.delays.push_back(parse_double(fields[0], context));
                 curve.efficiencies.push_back(parse_double(fields[1], context));
               });
  try {
    curve.validate();
  } catch (const std::exception& err) {
    throw IoError(path + ": " + err.what());
  }
  return curve;
}

}  // namespace qhot
