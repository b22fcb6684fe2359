#include "ddscope/pulse_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ddscope/errors.hpp"

namespace ddscope {

std::string to_string(SequenceFamily family) {
  switch (family) {
    case SequenceFamily::Ramsey: return "ramsey";
    case SequenceFamily::Cpmg: return "cpmg";
    case SequenceFamily::Uhrig: return "uhrig";
    case SequenceFamily::Custom: return "custom";
  }
  return "unknown";
}

PulseSequence::PulseSequence(double total_time, std::vector<double> pulse_times,
                             SequenceFamily family)
    : total_time_(total_time), pulse_times_(std::move(pulse_times)), family_(family) {
  if (!(total_time_ > 0.0) || !std::isfinite(total_time_)) {
    throw std::invalid_argument("PulseSequence: total_time must be positive and finite");
  }
  double prev = 0.0;
  for (double t : pulse_times_) {
    if (!std::isfinite(t) || t <= prev || t >= total_time_) {
      throw std::invalid_argument(
          "PulseSequence: pulse times must be strictly increasing and strictly "
          "inside (0, T)");
    }
    prev = t;
  }
  if (family_ == SequenceFamily::Ramsey && !pulse_times_.empty()) {
    throw std::invalid_argument("PulseSequence: Ramsey family has no pulses");
  }
}

PulseSequence make_cpmg(int n_pulses, double total_time) {
  if (n_pulses < 0) throw std::invalid_argument("make_cpmg: pulse count must be >= 0");
  if (!(total_time > 0.0)) throw std::invalid_argument("make_cpmg: total_time must be > 0");
  if (n_pulses == 0) return make_ramsey(total_time);
  std::vector<double> times(static_cast<std::size_t>(n_pulses));
  for (int j = 1; j <= n_pulses; ++j) {
    times[static_cast<std::size_t>(j - 1)] =
        (2.0 * j - 1.0) * total_time / (2.0 * n_pulses);
  }
  return PulseSequence(total_time, std::move(times), SequenceFamily::Cpmg);
}

PulseSequence make_uhrig(int n_pulses, double total_time) {
  if (n_pulses < 1) {
    throw std::invalid_argument("make_uhrig: pulse count must be >= 1 (use make_cpmg for N=0)");
  }
  if (!(total_time > 0.0)) throw std::invalid_argument("make_uhrig: total_time must be > 0");
  std::vector<double> times(static_cast<std::size_t>(n_pulses));
  for (int j = 1; j <= n_pulses; ++j) {
    const double s = std::sin(j * M_PI / (2.0 * n_pulses + 2.0));
    times[static_cast<std::size_t>(j - 1)] = total_time * s * s;
  }
  return PulseSequence(total_time, std::move(times), SequenceFamily::Uhrig);
}

PulseSequence make_ramsey(double total_time) {
  return PulseSequence(total_time, {}, SequenceFamily::Ramsey);
}

PulseSequence make_custom(double total_time, std::vector<double> pulse_times) {
  return PulseSequence(total_time, std::move(pulse_times), SequenceFamily::Custom);
}

int toggling_sign(const PulseSequence& seq, double t) {
  if (!(t >= 0.0) || !(t <= seq.total_time())) {
    throw std::invalid_argument("toggling_sign: t must lie in [0, T]");
  }
  const auto& times = seq.pulse_times();
  const auto fired = std::upper_bound(times.begin(), times.end(), t) - times.begin();
  return (fired % 2 == 0) ? 1 : -1;
}

PulseSequence load_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open sequence file '" + path + "'", 0, 0);
  std::string line;
  if (!std::getline(in, line)) throw parse_error("empty sequence file", 1, 1);
  if (line.rfind("T=", 0) != 0) {
    throw parse_error("sequence file must start with header 'T=<seconds>'", 1, 1);
  }
  double total_time = 0.0;
  try {
    std::size_t pos = 0;
    total_time = std::stod(line.substr(2), &pos);
    if (pos != line.size() - 2) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw parse_error("invalid total time in sequence header", 1, 1);
  }
  std::vector<double> times;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      times.push_back(std::stod(line, &pos));
      if (pos != line.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw parse_error("invalid pulse time in sequence file", row, 1);
    }
  }
  try {
    return make_custom(total_time, std::move(times));
  } catch (const std::invalid_argument& e) {
    throw parse_error(std::string("invalid sequence: ") + e.what(), row, 1);
  }
}

void save_sequence_file(const PulseSequence& seq, std::ostream& out) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "T=%.17g\n", seq.total_time());
  out << buf;
  for (double t : seq.pulse_times()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", t);
    out << buf;
  }
}

void save_sequence_file(const PulseSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sequence file '" + path + "'");
  save_sequence_file(seq, out);
}

}  // namespace ddscope
