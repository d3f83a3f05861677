#pragma once

#include <vector>

namespace mub {

struct ScheduleEvent {
  long t = 0;
  bool join = true;  // false: leave
  int user = 0;
};

// Join/leave script for dynamic scenarios. Users 0..initial_users-1 are active
// from t = 0; event at time t takes effect at round t. Event times live in
// (0, horizon].
struct UserSchedule {
  int initial_users = 0;
  long horizon = 0;
  std::vector<ScheduleEvent> events;  // ascending by t

  int user_count() const;                    // distinct user ids ever active
  std::vector<int> active_at(long t) const;  // ascending user ids
  int count_at(long t) const;

  // throws ConfigError on unordered events, double joins, leave-before-join,
  // times outside (0, horizon], or an active count leaving [1, max_users]
  void validate(int max_users) const;
};

// Joins only, timed so that the number of arrivals up to t tracks
// coeff * t^zeta (the j-th join lands at the first t with coeff*t^zeta >= j).
UserSchedule growth_schedule(int initial_users, long horizon, double zeta, double coeff);

}  // namespace mub
