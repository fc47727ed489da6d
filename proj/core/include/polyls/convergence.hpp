#pragma once

#include <string>
#include <vector>

namespace polyls {

// One benchmark solve at one refinement level.
struct RunRecord {
    std::string benchmark;
    std::string scheme;
    int level = 0;
    int n_elements = 0;
    int n_dofs = 0;
    double h = 0.0;
    double l2 = 0.0;
    double h1 = 0.0;
    double energy = 0.0;
    long interior_points = 0;
    double stiffness_seconds = 0.0;
};

// Least-squares slope of log(error) vs log(h). Requires at least 3 points and
// strictly decreasing h.
double fit_slope(const std::vector<double>& h, const std::vector<double>& error);

struct SlopeReport {
    std::string benchmark;
    std::string scheme;
    double l2_slope = 0.0;
    double h1_slope = 0.0;
    bool monotone = true; // errors decreased at every level
};

// Slopes per (benchmark, scheme) group of the records.
std::vector<SlopeReport> convergence_report(const std::vector<RunRecord>& records);

void write_csv(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_csv(const std::string& path);

// Plot-ready data: one whitespace-separated block per (benchmark, scheme).
void write_plot_data(const std::vector<RunRecord>& records, const std::string& path);

} // namespace polyls
