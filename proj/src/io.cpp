#include "l96da/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace l96da {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError("cannot parse number: '" + s + "'");
  }
  return value;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void write_cycles_csv(const std::string& path,
                      std::span<const CycleMetrics> cycles) {
  auto out = open_out(path);
  out << "cycle,f_rmse,f_spread,f_crps,a_rmse,a_spread,a_crps,diverged\n";
  for (const CycleMetrics& c : cycles) {
    out << c.cycle_index << ',' << format_double(c.forecast_rmse) << ','
        << format_double(c.forecast_spread) << ','
        << format_double(c.forecast_crps) << ','
        << format_double(c.analysis_rmse) << ','
        << format_double(c.analysis_spread) << ','
        << format_double(c.analysis_crps) << ',' << (c.diverged ? 1 : 0)
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace {
constexpr const char* kSummaryHeader =
    "method,obs,n,loc_radius,inflation,seed,cycles,spinup,"
    "f_rmse,f_spread,f_crps,a_rmse,a_spread,a_crps,diverged";
}

void write_summary_csv(const std::string& path,
                       std::span<const RunSummary> rows) {
  auto out = open_out(path);
  out << kSummaryHeader << '\n';
  for (const RunSummary& r : rows) {
    out << r.method << ',' << r.obs << ',' << r.ensemble_size << ','
        << format_double(r.loc_radius) << ',' << format_double(r.inflation)
        << ',' << r.seed << ',' << r.n_cycles << ',' << r.spinup_cycles << ','
        << format_double(r.forecast_rmse) << ','
        << format_double(r.forecast_spread) << ','
        << format_double(r.forecast_crps) << ','
        << format_double(r.analysis_rmse) << ','
        << format_double(r.analysis_spread) << ','
        << format_double(r.analysis_crps) << ',' << (r.diverged ? 1 : 0)
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<RunSummary> parse_summary_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty summary csv: " + path);
  std::vector<RunSummary> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 15) throw IoError("bad summary row: '" + line + "'");
    RunSummary r;
    r.method = f[0];
    r.obs = f[1];
    r.ensemble_size = static_cast<int>(parse_double(f[2]));
    r.loc_radius = parse_double(f[3]);
    r.inflation = parse_double(f[4]);
    r.seed = static_cast<std::uint64_t>(std::stoull(f[5]));
    r.n_cycles = static_cast<int>(parse_double(f[6]));
    r.spinup_cycles = static_cast<int>(parse_double(f[7]));
    r.forecast_rmse = parse_double(f[8]);
    r.forecast_spread = parse_double(f[9]);
    r.forecast_crps = parse_double(f[10]);
    r.analysis_rmse = parse_double(f[11]);
    r.analysis_spread = parse_double(f[12]);
    r.analysis_crps = parse_double(f[13]);
    r.diverged = f[14] == "1";
    rows.push_back(r);
  }
  return rows;
}

void write_bench_csv(const std::string& path,
                     std::span<const ScalarBenchCell> cells) {
  auto out = open_out(path);
  out << "filter,n,y,gamma_requested,gamma_used,median_max_abs_error\n";
  for (const ScalarBenchCell& c : cells) {
    out << (c.filter == ScalarFilter::Rhf ? "RHF" : "iRHF") << ','
        << c.ensemble_size << ',' << format_double(c.y) << ','
        << format_double(c.gamma_requested) << ','
        << format_double(c.gamma_used) << ','
        << format_double(c.median_max_abs_error) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace {

std::string fixed2(double x) {
  if (std::isnan(x)) return "div";
  if (std::isinf(x)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  // snprintf is locale sensitive for the decimal point; normalize
  for (char& c : buf) {
    if (c == ',') c = '.';
  }
  return buf;
}

std::string radius_str(double d) {
  if (std::isinf(d)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", d);
  for (char& c : buf) {
    if (c == ',') c = '.';
  }
  return buf;
}

}  // namespace

std::string render_method_table(std::span<const RunSummary> rows) {
  std::ostringstream os;
  const char* fmt = "%-8s %-6s %-12s %-10s %8s %9s %7s %8s %9s %7s\n";
  char line[160];
  std::snprintf(line, sizeof(line), fmt, "Method", "N", "Loc. Radius",
                "Inflation", "F. RMSE", "F. Spread", "F. CRPS", "A. RMSE",
                "A. Spread", "A. CRPS");
  os << line;
  for (const RunSummary& r : rows) {
    std::snprintf(line, sizeof(line), fmt, r.method.c_str(),
                  std::to_string(r.ensemble_size).c_str(),
                  radius_str(r.loc_radius).c_str(),
                  fixed2(r.inflation).c_str(), fixed2(r.forecast_rmse).c_str(),
                  fixed2(r.forecast_spread).c_str(),
                  fixed2(r.forecast_crps).c_str(),
                  fixed2(r.analysis_rmse).c_str(),
                  fixed2(r.analysis_spread).c_str(),
                  fixed2(r.analysis_crps).c_str());
    os << line;
  }
  return os.str();
}

std::vector<RunSummary> best_rows(std::span<const RunSummary> rows) {
  std::map<std::pair<std::string, int>, RunSummary> best;
  for (const RunSummary& r : rows) {
    const auto key = std::make_pair(r.method, r.ensemble_size);
    const auto it = best.find(key);
    const bool usable = !r.diverged && std::isfinite(r.analysis_rmse);
    if (it == best.end()) {
      best[key] = r;
      continue;
    }
    const bool incumbent_usable =
        !it->second.diverged && std::isfinite(it->second.analysis_rmse);
    if ((usable && !incumbent_usable) ||
        (usable && incumbent_usable &&
         r.analysis_rmse < it->second.analysis_rmse)) {
      it->second = r;
    }
  }
  std::vector<RunSummary> out;
  for (auto& [key, r] : best) out.push_back(r);
  return out;
}

}  // namespace l96da
