#pragma once

#include <map>
#include <string>
#include <vector>

#include "ddscope/fit_models.hpp"
#include "ddscope/time_series.hpp"

namespace ddscope {

// CSV schemas (headers are matched exactly):
//   fringes.csv    n_pulses,T_s,phase_deg,atoms,atoms_err
//   lifetime.csv   T_s,atoms,atoms_err
//   timeseries.csv t_s,value
// Parse failures throw parse_error with the 1-based row/column location.

struct FringeRow {
  int n_pulses;
  double total_time;
  double phase_deg;
  double atoms;
  double atoms_err;
};

std::vector<FringeRow> load_fringes_csv(const std::string& path);

// Groups fringe rows into per-N datasets with the scans ordered by T.
std::map<int, VisibilityDataset> group_fringes(const std::vector<FringeRow>& rows);

DataSeries load_lifetime_csv(const std::string& path);

// Requires a uniform time grid (relative tolerance 1e-6 on the spacing).
TimeSeries load_timeseries_csv(const std::string& path);

}  // namespace ddscope
