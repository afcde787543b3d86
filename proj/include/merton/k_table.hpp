#pragma once

#include "merton/hjb_solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace merton {

inline constexpr std::string_view kKTableHeader = "z,K,Kprime,B_lower,B_upper,C_upper";

/// One row per grid point, 17 significant digits, so reading the table back
/// reproduces the solver columns bit for bit.
void write_k_table(std::ostream& out, const ModelParams& p, const KSolution& sol);
void write_k_table(const std::filesystem::path& path, const ModelParams& p, const KSolution& sol);

struct KTable {
  std::vector<double> z, k, kprime, b_lower, b_upper, c_upper;
};

KTable read_k_table(std::istream& in);
KTable read_k_table(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// `key=value` summary lines.
using Summary = std::vector<std::pair<std::string, std::string>>;
void write_summary(std::ostream& out, const Summary& s);

} // namespace merton
