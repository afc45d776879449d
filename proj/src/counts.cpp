#include "trs/counts.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace trs {

const std::array<std::string_view, 7>& TrsCounts::cell_names() {
  static const std::array<std::string_view, 7> names = {
      "x111", "x110", "x101", "x011", "x100", "x010", "x001"};
  return names;
}

void TrsCounts::validate() const {
  for (std::size_t i = 0; i < 7; ++i) {
    if (cells()[i] < 0) {
      throw std::invalid_argument("cell " + std::string(cell_names()[i]) +
                                  " is negative");
    }
  }
  if (observed_total() < 1) {
    throw std::invalid_argument("x0 must be >= 1: all cells are zero");
  }
}

Margins margins(const TrsCounts& c) {
  c.validate();
  Margins m;
  m.x0 = c.observed_total();
  m.n1 = c.list1_total();
  m.n2 = c.list2_total();
  m.n3 = c.list3_total();
  m.x11d = c.x111 + c.x110;
  m.x1d1 = c.x111 + c.x101;
  m.xd11 = c.x111 + c.x011;
  m.x1d0 = c.x110 + c.x100;
  m.xd10 = c.x110 + c.x010;
  m.x10d = c.x101 + c.x100;
  m.xd01 = c.x101 + c.x001;
  m.x0d1 = c.x011 + c.x001;
  m.x01d = c.x011 + c.x010;
  m.mtb.u1 = m.n1;
  m.mtb.u2 = m.x01d;
  m.mtb.u3 = c.x001;
  m.mtb.m2 = m.x11d;
  m.mtb.m3 = c.x111 + c.x101 + c.x011;
  m.mtb.M2 = m.mtb.u1;
  m.mtb.M3 = m.mtb.u1 + m.mtb.u2;
  return m;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_fields(std::string_view line) {
  char delim = ',';
  if (line.find('\t') != std::string_view::npos) {
    delim = '\t';
  } else if (line.find(',') == std::string_view::npos &&
             line.find(';') != std::string_view::npos) {
    delim = ';';
  }
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::int64_t parse_int(const std::string& token) {
  std::int64_t value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("value '" + token + "' is not an integer");
  }
  return value;
}

}  // namespace

TrsCounts parse_counts(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find('\n', start);
    std::string line = trim(text.substr(start, pos - start));
    if (!line.empty()) lines.push_back(std::move(line));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (lines.empty()) throw std::invalid_argument("empty table");
  if (lines.size() != 2) {
    throw std::invalid_argument("expected a header row and exactly one data row, got " +
                                std::to_string(lines.size()) + " rows");
  }

  const auto header = split_fields(lines[0]);
  const auto row = split_fields(lines[1]);
  if (header.size() != row.size()) {
    throw std::invalid_argument("header and data row have different field counts");
  }

  const auto& names = TrsCounts::cell_names();
  std::array<std::int64_t, 7> values{};
  std::array<bool, 7> seen{};
  for (std::size_t f = 0; f < header.size(); ++f) {
    std::string name = header[f];
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      throw std::invalid_argument("unknown cell name '" + header[f] + "'");
    }
    const std::size_t idx = static_cast<std::size_t>(it - names.begin());
    if (seen[idx]) {
      throw std::invalid_argument("duplicate cell name '" + header[f] + "'");
    }
    seen[idx] = true;
    values[idx] = parse_int(row[f]);
  }
  for (std::size_t i = 0; i < 7; ++i) {
    if (!seen[i]) {
      throw std::invalid_argument("missing cell name '" + std::string(names[i]) + "'");
    }
  }

  TrsCounts c{values[0], values[1], values[2], values[3],
              values[4], values[5], values[6]};
  c.validate();
  return c;
}

std::string emit_counts(const TrsCounts& counts, char delimiter) {
  std::ostringstream out;
  const auto& names = TrsCounts::cell_names();
  for (std::size_t i = 0; i < 7; ++i) {
    if (i) out << delimiter;
    out << names[i];
  }
  out << '\n';
  const auto cells = counts.cells();
  for (std::size_t i = 0; i < 7; ++i) {
    if (i) out << delimiter;
    out << cells[i];
  }
  out << '\n';
  return out.str();
}

const std::vector<BuiltinDataset>& builtin_datasets() {
  static const std::vector<BuiltinDataset> datasets = {
      {{155, 31, 131, 45, 56, 30, 332}, {"ld_all", "all", std::nullopt}},
      {{13, 2, 6, 8, 3, 2, 35}, {"ld_north", "north", 1671534}},
      {{45, 3, 42, 7, 13, 13, 62}, {"ld_east", "east", 4467527}},
      {{46, 7, 55, 14, 23, 5, 136}, {"ld_west", "west", 5955299}},
      {{51, 19, 28, 15, 13, 9, 99}, {"ld_south", "south", 3892715}},
      {{28, 21, 17, 18, 69, 55, 63}, {"hav", "all", std::nullopt}},
  };
  return datasets;
}

const BuiltinDataset& builtin_dataset(std::string_view name) {
  for (const auto& d : builtin_datasets()) {
    if (d.meta.name == name) return d;
  }
  throw std::invalid_argument("unknown dataset '" + std::string(name) +
                              "'; available: ld_all, ld_north, ld_east, ld_west, "
                              "ld_south, hav");
}

}  // namespace trs
