#include "smd/harness/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "smd/errors.hpp"

namespace smd::harness {

namespace {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_real(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty())
    throw ParseError("trace line " + std::to_string(line_no) + ": bad number '" + field + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& field, std::size_t line_no) {
  if (field.empty()) return std::nullopt;
  return parse_real(field, line_no);
}

}  // namespace

std::string trace_header(std::size_t x_dim, std::size_t y_dim) {
  std::string header = "n,t,alpha,mu";
  for (std::size_t i = 0; i < x_dim; ++i) header += ",x_" + std::to_string(i);
  for (std::size_t i = 0; i < y_dim; ++i) header += ",y_" + std::to_string(i);
  header += ",gap,v_star,dist_euclid";
  return header;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  const std::size_t nx = trace.records.empty() ? 0 : static_cast<std::size_t>(trace.records.front().x.size());
  const std::size_t ny = trace.records.empty() ? 0 : static_cast<std::size_t>(trace.records.front().y.size());
  out << trace_header(nx, ny) << '\n';
  for (const auto& rec : trace.records) {
    out << rec.n << ',' << format_real(rec.t) << ',' << format_real(rec.alpha) << ',' << format_optional(rec.mu);
    for (Eigen::Index i = 0; i < rec.x.size(); ++i) out << ',' << format_real(rec.x(i));
    for (Eigen::Index i = 0; i < rec.y.size(); ++i) out << ',' << format_real(rec.y(i));
    out << ',' << format_optional(rec.gap) << ',' << format_optional(rec.v_star) << ','
        << format_optional(rec.dist_euclid) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace file " + path.string());
  write_trace_csv(out, trace);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<IterateRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace: missing header");
  const auto header = split(line);
  std::size_t nx = 0;
  std::size_t ny = 0;
  for (const auto& h : header) {
    if (h.rfind("x_", 0) == 0) ++nx;
    if (h.rfind("y_", 0) == 0) ++ny;
  }
  if (header.size() != 7 + nx + ny || line != trace_header(nx, ny))
    throw ParseError("trace line 1: unexpected header '" + line + "'");

  std::vector<IterateRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size())
      throw ParseError("trace line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(f.size()));
    IterateRecord rec;
    {
      std::uint64_t n = 0;
      auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), n);
      if (ec != std::errc() || ptr != f[0].data() + f[0].size() || f[0].empty())
        throw ParseError("trace line " + std::to_string(line_no) + ": bad iteration index '" + f[0] + "'");
      rec.n = n;
    }
    rec.t = parse_real(f[1], line_no);
    rec.alpha = parse_real(f[2], line_no);
    rec.mu = parse_optional(f[3], line_no);
    rec.x.resize(static_cast<Eigen::Index>(nx));
    rec.y.resize(static_cast<Eigen::Index>(ny));
    for (std::size_t i = 0; i < nx; ++i) rec.x(static_cast<Eigen::Index>(i)) = parse_real(f[4 + i], line_no);
    for (std::size_t i = 0; i < ny; ++i) rec.y(static_cast<Eigen::Index>(i)) = parse_real(f[4 + nx + i], line_no);
    rec.gap = parse_optional(f[4 + nx + ny], line_no);
    rec.v_star = parse_optional(f[5 + nx + ny], line_no);
    rec.dist_euclid = parse_optional(f[6 + nx + ny], line_no);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<IterateRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file " + path.string());
  return read_trace_csv(in);
}

}  // namespace smd::harness
