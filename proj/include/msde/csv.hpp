#pragma once

#include <string>
#include <vector>

#include "msde/likelihood.hpp"
#include "msde/mc.hpp"
#include "msde/model.hpp"

namespace msde {

// Shortest round-trip decimal representation (std::to_chars); CSVs written
// with it are bit-checkable after a parse.
std::string format_double(double v);

void write_path_csv(const Path& path, const std::string& file);
Path read_path_csv(const std::string& file);

// columns y,value
void write_grid_csv(const std::vector<double>& y, const std::vector<double>& v,
                    const std::string& file);

struct ProfilePoint {
  double theta;
  double value;
  LikelihoodKind kind;
};
void write_profile_csv(const std::vector<ProfilePoint>& points, const std::string& file);

// one row per (theta0, epsilon) cell
struct SummaryRow {
  double theta0, epsilon, delta;
  int M;
  double mean, sd, ci68_lo, ci68_hi, ci95_lo, ci95_hi;
  int failures;
};
std::string summary_csv_text(const std::vector<SummaryRow>& rows);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& file);

void write_hist_csv(const Histogram& h, const std::string& file);
void write_theory_csv(const TheoryCurve& c, const std::string& file);

}  // namespace msde
