#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trs {

// Observed cells of a triple record system. x_ijk counts the individuals whose
// presence pattern across the three lists is (i, j, k); the (0,0,0) cell is
// unobservable. All margins are derived on demand, never stored.
struct TrsCounts {
  std::int64_t x111 = 0;
  std::int64_t x110 = 0;
  std::int64_t x101 = 0;
  std::int64_t x011 = 0;
  std::int64_t x100 = 0;
  std::int64_t x010 = 0;
  std::int64_t x001 = 0;

  std::int64_t observed_total() const {  // x0
    return x111 + x110 + x101 + x011 + x100 + x010 + x001;
  }
  std::int64_t list1_total() const { return x111 + x110 + x101 + x100; }  // n1
  std::int64_t list2_total() const { return x111 + x110 + x011 + x010; }  // n2
  std::int64_t list3_total() const { return x111 + x101 + x011 + x001; }  // n3

  // Canonical cell order used by every table in this library.
  std::array<std::int64_t, 7> cells() const {
    return {x111, x110, x101, x011, x100, x010, x001};
  }
  static const std::array<std::string_view, 7>& cell_names();

  // Throws std::invalid_argument when a cell is negative or all cells are zero.
  void validate() const;

  bool operator==(const TrsCounts&) const = default;
};

// First-capture/recapture statistics when the lists are read as ordered
// capture occasions.
struct MtbSufficientStats {
  std::int64_t u1 = 0, u2 = 0, u3 = 0;  // first captures per occasion
  std::int64_t m2 = 0, m3 = 0;          // recaptures on occasions 2 and 3
  std::int64_t M2 = 0, M3 = 0;          // distinct individuals seen before occasion l
};

struct Margins {
  std::int64_t x0 = 0;
  std::int64_t n1 = 0, n2 = 0, n3 = 0;
  std::int64_t x11d = 0, x1d1 = 0, xd11 = 0;  // pairwise "in" margins
  std::int64_t x1d0 = 0, xd10 = 0, x10d = 0;
  std::int64_t xd01 = 0, x0d1 = 0, x01d = 0;
  MtbSufficientStats mtb;
};

Margins margins(const TrsCounts& counts);

struct DatasetMeta {
  std::string name;
  std::string stratum = "all";
  std::optional<std::int64_t> inhabitants;  // enables incidence rates
};

// Parses a delimited table (comma, semicolon or tab separated) whose header
// names the seven cells in any order, followed by exactly one data row.
TrsCounts parse_counts(std::string_view text);

std::string emit_counts(const TrsCounts& counts, char delimiter = ',');

struct BuiltinDataset {
  TrsCounts counts;
  DatasetMeta meta;
};

// The bundled surveillance datasets: ld_all, ld_north, ld_east, ld_west,
// ld_south and hav. LD strata carry regional inhabitant counts.
const std::vector<BuiltinDataset>& builtin_datasets();
const BuiltinDataset& builtin_dataset(std::string_view name);

}  // namespace trs
