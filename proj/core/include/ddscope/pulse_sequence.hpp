#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddscope {

enum class SequenceFamily { Ramsey, Cpmg, Uhrig, Custom };

std::string to_string(SequenceFamily family);

// A sequence of instantaneous pi-pulses between the two pi/2-pulses of a
// Ramsey interferometer.  Pulse times are strictly increasing and strictly
// inside (0, T).  Immutable after construction.
class PulseSequence {
 public:
  PulseSequence(double total_time, std::vector<double> pulse_times,
                SequenceFamily family);

  double total_time() const { return total_time_; }
  const std::vector<double>& pulse_times() const { return pulse_times_; }
  int pulse_count() const { return static_cast<int>(pulse_times_.size()); }
  SequenceFamily family() const { return family_; }

 private:
  double total_time_;
  std::vector<double> pulse_times_;
  SequenceFamily family_;
};

// N equidistant pulses at t_j = (2j-1) T / (2N).  N = 0 yields the bare
// Ramsey sequence; N = 1 is the spin echo.
PulseSequence make_cpmg(int n_pulses, double total_time);

// Pulses at t_j = T sin^2(j pi / (2N+2)); coincides with CPMG for N <= 2.
PulseSequence make_uhrig(int n_pulses, double total_time);

PulseSequence make_ramsey(double total_time);

PulseSequence make_custom(double total_time, std::vector<double> pulse_times);

// Toggling-frame sign cos(Phi(t)) = +/-1: (-1)^(number of pulses at or
// before t).  A pulse exactly at t counts as already applied.
int toggling_sign(const PulseSequence& seq, double t);

// Sequence file format: header line "T=<seconds>", then one pulse time per
// line.  Loaded sequences carry the Custom family tag.
PulseSequence load_sequence_file(const std::string& path);
void save_sequence_file(const PulseSequence& seq, std::ostream& out);
void save_sequence_file(const PulseSequence& seq, const std::string& path);

}  // namespace ddscope
