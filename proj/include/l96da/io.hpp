#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "l96da/ensemble.hpp"
#include "l96da/experiment.hpp"

namespace l96da {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal representation, locale independent.
/// Infinities print as "inf"/"-inf", NaN as "nan".
std::string format_double(double x);
double parse_double(const std::string& s);

/// Header `cycle,f_rmse,f_spread,f_crps,a_rmse,a_spread,a_crps,diverged`,
/// one row per cycle, LF line endings.
void write_cycles_csv(const std::string& path,
                      std::span<const CycleMetrics> cycles);

void write_summary_csv(const std::string& path,
                       std::span<const RunSummary> rows);
std::vector<RunSummary> parse_summary_csv(const std::string& path);

void write_bench_csv(const std::string& path,
                     std::span<const ScalarBenchCell> cells);

/// Fixed-width text table in the layout of the result tables: one row per
/// summary, columns Method, Loc. Radius, Inflation, then forecast and
/// analysis RMSE / Spread / CRPS.
std::string render_method_table(std::span<const RunSummary> rows);

/// Per (method, N): the row with the smallest analysis RMSE (diverged rows
/// lose against finished ones).
std::vector<RunSummary> best_rows(std::span<const RunSummary> rows);

}  // namespace l96da
