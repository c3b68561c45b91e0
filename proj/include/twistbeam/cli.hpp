#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace twistbeam::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

using Cell = std::variant<long long, double, std::string>;

/// One fully materialized output table. Rows are only written to disk after
/// the whole computation succeeds, so a failing run leaves no partial file.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::string config_line;          // canonical key=value echo, hashed into the header
  bool numerical_failure = false;   // at least one row could not be computed
};

/// Fixed 12-significant-digit rendering used for CSV cells; infinities render
/// as "inf"/"-inf" and negative zero is normalized.
std::string format_number(double v);

void write_csv(const Table& table, std::ostream& os);
void write_json(const Table& table, std::ostream& os);

/// Entry point behind the twistbeam binary. Returns 0 on success, 2 on usage
/// errors, 3 on numerical failures.
int run(int argc, const char* const* argv);

}  // namespace twistbeam::cli
