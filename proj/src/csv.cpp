#include "poua/csv.hpp"

#include <cmath>
#include <ostream>

#include "poua/config_file.hpp"

namespace poua {

std::string num(double x) { return std::isnan(x) ? "nan" : format_double(x); }
std::string num(std::int64_t x) { return std::to_string(x); }
std::string num(std::uint64_t x) { return std::to_string(x); }

namespace {

void write_field(std::ostream& out, const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) {
    out << f;
    return;
  }
  out << '"';
  for (char c : f) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    write_field(out, row[i]);
  }
  out << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const Table& t) {
  write_row(out, t.header);
  for (const auto& r : t.rows) write_row(out, r);
}

}  // namespace poua
