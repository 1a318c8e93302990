#pragma once

#include <vector>

#include "driftless/errors.hpp"

namespace driftless {

enum class ScheduleKind { harmonic, geometric };

/// Strictly increasing checkpoint times t_0 = 0 < t_1 < ... < t_count with
/// strictly decreasing interval lengths. Immutable after construction.
struct CheckpointSchedule {
  ScheduleKind kind = ScheduleKind::harmonic;
  double t_star = 0.0;   // harmonic: interval n has length t_star / n
  double t_final = 0.0;  // geometric: times approach t_final from below
  double ratio = 0.0;    // geometric: t_n = t_final * (ratio^n - 1) / ratio^n
  std::vector<double> times;

  int count() const { return static_cast<int>(times.size()) - 1; }
};

/// times[n] = t_star * (1 + 1/2 + ... + 1/n). Partial sums are formed from
/// tail sums accumulated smallest-term-first to limit rounding error.
CheckpointSchedule harmonic_schedule(double t_star, int count);

/// times[n] = t_final * (ratio^n - 1) / ratio^n, ratio > 1.
CheckpointSchedule geometric_schedule(double t_final, double ratio, int count);

/// times[n] - times[n-1] for 1 <= n <= count; IndexError otherwise.
double interval_length(const CheckpointSchedule& s, int n);

}  // namespace driftless
