#include "merton/k_table.hpp"

#include "merton/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace merton {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_k_table(std::ostream& out, const ModelParams& p, const KSolution& sol) {
  const Envelopes env(p);
  out << kKTableHeader << '\n';
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const double z = sol.grid[i];
    const double k = sol.k_values[i];
    out << format_double(z) << ',' << format_double(k) << ',' << format_double(sol.kprime_values[i]) << ','
        << format_double(env.b_lower(z)) << ',' << format_double(env.b_upper(z)) << ','
        << format_double(env.c_upper(z, k)) << '\n';
  }
}

void write_k_table(const std::filesystem::path& path, const ModelParams& p, const KSolution& sol) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  write_k_table(out, p, sol);
}

KTable read_k_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kKTableHeader)
    throw std::runtime_error("k table: expected header " + std::string(kKTableHeader));
  KTable t;
  std::vector<double>* cols[] = {&t.z, &t.k, &t.kprime, &t.b_lower, &t.b_upper, &t.c_upper};
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty())
      continue;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t c = 0; c < 6; ++c) {
      double v = 0.0;
      const auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{} || (c < 5 && (next == end || *next != ',')) || (c == 5 && next != end))
        throw std::runtime_error("k table: malformed row " + std::to_string(row));
      cols[c]->push_back(v);
      p = next + 1;
    }
  }
  return t;
}

KTable read_k_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  return read_k_table(in);
}

void write_summary(std::ostream& out, const Summary& s) {
  for (const auto& [k, v] : s)
    out << k << '=' << v << '\n';
}

} // namespace merton
