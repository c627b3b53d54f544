#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smd/solvers.hpp"

namespace smd::harness {

/// Trace CSV layout, one row per recorded iterate:
///
///   n,t,alpha,mu,x_0,...,x_{n-1},y_0,...,y_{m-1},gap,v_star,dist_euclid
///
/// Reals use 17 significant digits so every value reads back bit-exactly.
/// Unset optionals (mu for first-order runs, skipped diagnostics) are empty.
std::string trace_header(std::size_t x_dim, std::size_t y_dim);
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

/// Inverse of write_trace_csv. Dimensions come from the header. Throws
/// ParseError naming the offending line.
std::vector<IterateRecord> read_trace_csv(std::istream& in);
std::vector<IterateRecord> read_trace_csv(const std::filesystem::path& path);

}  // namespace smd::harness
