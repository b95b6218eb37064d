#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace poua {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

// Round-trippable shortest form; "nan" for NaN.
std::string num(double x);
std::string num(std::int64_t x);
std::string num(std::uint64_t x);
inline std::string num(int x) { return num(static_cast<std::int64_t>(x)); }
inline std::string num(unsigned x) { return num(static_cast<std::uint64_t>(x)); }

void write_csv(std::ostream& out, const Table& t);

}  // namespace poua
