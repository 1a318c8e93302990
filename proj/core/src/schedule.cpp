#include "driftless/schedule.hpp"

#include <cmath>
#include <string>

namespace driftless {

CheckpointSchedule harmonic_schedule(double t_star, int count) {
  if (!(t_star > 0.0) || !std::isfinite(t_star))
    throw InvalidSchedule("harmonic_schedule: t_star must be positive");
  if (count < 1) throw InvalidSchedule("harmonic_schedule: count must be >= 1");

  // tail[n] = sum_{k=n..count} 1/k, accumulated from the smallest term up.
  std::vector<double> tail(static_cast<std::size_t>(count) + 2, 0.0);
  for (int k = count; k >= 1; --k) tail[k] = tail[k + 1] + 1.0 / k;

  CheckpointSchedule s;
  s.kind = ScheduleKind::harmonic;
  s.t_star = t_star;
  s.times.resize(static_cast<std::size_t>(count) + 1);
  s.times[0] = 0.0;
  for (int n = 1; n <= count; ++n) s.times[n] = t_star * (tail[1] - tail[n + 1]);
  return s;
}

CheckpointSchedule geometric_schedule(double t_final, double ratio, int count) {
  if (!(t_final > 0.0) || !std::isfinite(t_final))
    throw InvalidSchedule("geometric_schedule: t_final must be positive");
  if (!(ratio > 1.0) || !std::isfinite(ratio))
    throw InvalidSchedule("geometric_schedule: ratio must be > 1");
  if (count < 1) throw InvalidSchedule("geometric_schedule: count must be >= 1");

  CheckpointSchedule s;
  s.kind = ScheduleKind::geometric;
  s.t_final = t_final;
  s.ratio = ratio;
  s.times.resize(static_cast<std::size_t>(count) + 1);
  s.times[0] = 0.0;
  for (int n = 1; n <= count; ++n) s.times[n] = t_final * (1.0 - std::pow(ratio, -n));
  return s;
}

double interval_length(const CheckpointSchedule& s, int n) {
  if (n < 1 || n > s.count())
    throw IndexError("interval_length: index " + std::to_string(n) + " out of range [1, " +
                     std::to_string(s.count()) + "]");
  return s.times[n] - s.times[n - 1];
}

}  // namespace driftless
