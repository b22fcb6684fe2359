#include "ddscope/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ddscope/errors.hpp"

namespace ddscope {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

class CsvReader {
 public:
  CsvReader(const std::string& path, const std::string& header) : in_(path), path_(path) {
    if (!in_) throw parse_error("cannot open '" + path + "'", 0, 0);
    std::string line;
    if (!std::getline(in_, line)) throw parse_error("empty file '" + path + "'", 1, 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) {
      throw parse_error("expected header '" + header + "', got '" + line + "'", 1, 1);
    }
    n_cols_ = split_csv_line(header).size();
  }

  // next row of exactly n_cols numeric cells; false at end of file
  bool next(std::vector<double>& values) {
    std::string line;
    while (std::getline(in_, line)) {
      ++row_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto cells = split_csv_line(line);
      if (cells.size() != n_cols_) {
        throw parse_error("expected " + std::to_string(n_cols_) + " columns, got " +
                              std::to_string(cells.size()),
                          row_, cells.size() + 1);
      }
      values.resize(n_cols_);
      for (std::size_t c = 0; c < n_cols_; ++c) {
        try {
          std::size_t pos = 0;
          values[c] = std::stod(cells[c], &pos);
          if (pos != cells[c].size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
          throw parse_error("non-numeric cell '" + cells[c] + "'", row_, c + 1);
        }
      }
      return true;
    }
    return false;
  }

  std::size_t row() const { return row_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t n_cols_ = 0;
  std::size_t row_ = 1;
};

}  // namespace

std::vector<FringeRow> load_fringes_csv(const std::string& path) {
  CsvReader reader(path, "n_pulses,T_s,phase_deg,atoms,atoms_err");
  std::vector<FringeRow> rows;
  std::vector<double> v;
  while (reader.next(v)) {
    FringeRow row;
    row.n_pulses = static_cast<int>(std::lround(v[0]));
    if (row.n_pulses < 0 || std::abs(v[0] - row.n_pulses) > 1e-9) {
      throw parse_error("n_pulses must be a non-negative integer", reader.row(), 1);
    }
    row.total_time = v[1];
    if (!(row.total_time > 0.0)) throw parse_error("T_s must be > 0", reader.row(), 2);
    row.phase_deg = v[2];
    row.atoms = v[3];
    row.atoms_err = v[4];
    if (!(row.atoms_err > 0.0)) throw parse_error("atoms_err must be > 0", reader.row(), 5);
    rows.push_back(row);
  }
  return rows;
}

std::map<int, VisibilityDataset> group_fringes(const std::vector<FringeRow>& rows) {
  std::map<int, std::map<double, FringeScan>> scans;
  for (const auto& row : rows) {
    auto& scan = scans[row.n_pulses][row.total_time];
    scan.total_time = row.total_time;
    scan.points.push_back({row.phase_deg, row.atoms, row.atoms_err});
  }
  std::map<int, VisibilityDataset> datasets;
  for (auto& [n, by_time] : scans) {
    VisibilityDataset ds;
    ds.n_pulses = n;
    for (auto& [t, scan] : by_time) ds.fringes.push_back(std::move(scan));
    datasets.emplace(n, std::move(ds));
  }
  return datasets;
}

DataSeries load_lifetime_csv(const std::string& path) {
  CsvReader reader(path, "T_s,atoms,atoms_err");
  DataSeries data;
  std::vector<double> v;
  while (reader.next(v)) {
    if (!(v[2] > 0.0)) throw parse_error("atoms_err must be > 0", reader.row(), 3);
    data.x.push_back(v[0]);
    data.y.push_back(v[1]);
    data.sigma.push_back(v[2]);
  }
  return data;
}

TimeSeries load_timeseries_csv(const std::string& path) {
  CsvReader reader(path, "t_s,value");
  TimeSeries ts;
  std::vector<double> v;
  double t_prev = 0.0;
  while (reader.next(v)) {
    if (ts.samples.size() == 1) {
      ts.dt = v[0] - t_prev;
      if (!(ts.dt > 0.0)) throw parse_error("time grid must be increasing", reader.row(), 1);
    } else if (ts.samples.size() > 1) {
      const double step = v[0] - t_prev;
      if (std::abs(step - ts.dt) > 1e-6 * ts.dt) {
        throw parse_error("non-uniform time grid", reader.row(), 1);
      }
    }
    t_prev = v[0];
    ts.samples.push_back(v[1]);
  }
  if (ts.samples.size() < 2) throw parse_error("time series needs >= 2 samples", reader.row(), 1);
  return ts;
}

}  // namespace ddscope
