#pragma once

// Plain comma-separated tables. Fields never contain commas or quotes here,
// so no quoting is done; doubles are written with 17 significant digits.

#include <string>
#include <vector>

namespace fpinn::harness {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  int column(const std::string& name) const;  // throws if missing
  std::vector<double> numeric_column(const std::string& name) const;
  std::string to_string() const;
};

std::string fmt(double v);
std::string fmt(long v);
inline std::string fmt(int v) { return fmt(static_cast<long>(v)); }
inline std::string fmt(unsigned long v) { return fmt(static_cast<long>(v)); }
inline std::string fmt(long long v) { return fmt(static_cast<long>(v)); }
inline std::string fmt(unsigned long long v) { return fmt(static_cast<long>(v)); }

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

inline const std::vector<std::string> kReportHeader = {"seed",         "variant",          "case",       "rel_l2",
                                                      "wall_clock_s", "n_active_fourier", "n_active_nn"};
inline const std::vector<std::string> kHistoryHeader = {"iter",          "phase",         "loss_total",
                                                       "loss_boundary", "loss_residual", "rel_l2"};
inline const std::vector<std::string> kSpectrumHeader = {"k", "amp_truth", "amp_model", "abs_err"};

}  // namespace fpinn::harness
