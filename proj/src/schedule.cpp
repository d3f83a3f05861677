#include "mub/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mub/errors.hpp"

namespace mub {

int UserSchedule::user_count() const {
  int hi = initial_users;
  for (const auto& e : events) hi = std::max(hi, e.user + 1);
  return hi;
}

std::vector<int> UserSchedule::active_at(long t) const {
  std::vector<char> on(user_count(), 0);
  for (int u = 0; u < initial_users; ++u) on[u] = 1;
  for (const auto& e : events) {
    if (e.t > t) break;
    on[e.user] = e.join ? 1 : 0;
  }
  std::vector<int> ids;
  for (size_t u = 0; u < on.size(); ++u)
    if (on[u]) ids.push_back(static_cast<int>(u));
  return ids;
}

int UserSchedule::count_at(long t) const { return static_cast<int>(active_at(t).size()); }

void UserSchedule::validate(int max_users) const {
  if (initial_users < 1) throw ConfigError("schedule: initial_users must be >= 1");
  if (horizon < 1) throw ConfigError("schedule: horizon must be >= 1");
  std::set<int> active;
  for (int u = 0; u < initial_users; ++u) active.insert(u);
  long prev_t = 0;
  for (const auto& e : events) {
    std::ostringstream at;
    at << "schedule event at t=" << e.t << " user=" << e.user << ": ";
    if (e.t <= 0 || e.t > horizon)
      throw ConfigError(at.str() + "event times must lie in (0, horizon]");
    if (e.t < prev_t) throw ConfigError(at.str() + "events must be ordered by time");
    prev_t = e.t;
    if (e.join) {
      if (active.count(e.user)) throw ConfigError(at.str() + "user already active");
      active.insert(e.user);
    } else {
      if (!active.count(e.user)) throw ConfigError(at.str() + "user leaves before joining");
      active.erase(e.user);
    }
    if (active.empty()) throw ConfigError(at.str() + "active user count dropped to 0");
    if (static_cast<int>(active.size()) > max_users) {
      std::ostringstream os;
      os << at.str() << "active user count " << active.size() << " exceeds limit "
         << max_users;
      throw ConfigError(os.str());
    }
  }
  if (initial_users > max_users)
    throw ConfigError("schedule: initial_users exceeds the user limit");
}

UserSchedule growth_schedule(int initial_users, long horizon, double zeta, double coeff) {
  if (zeta <= 0.0 || zeta >= 0.5)
    throw ConfigError("growth schedule: zeta must lie in (0, 0.5)");
  if (coeff <= 0.0) throw ConfigError("growth schedule: coeff must be > 0");
  UserSchedule s;
  s.initial_users = initial_users;
  s.horizon = horizon;
  int next_user = initial_users;
  long arrivals = static_cast<long>(std::floor(coeff * std::pow(double(horizon), zeta)));
  for (long j = 1; j <= arrivals; ++j) {
    long t = static_cast<long>(std::ceil(std::pow(double(j) / coeff, 1.0 / zeta)));
    t = std::max<long>(t, 1);
    if (t > horizon) break;
    s.events.push_back({t, true, next_user++});
  }
  return s;
}

}  // namespace mub
