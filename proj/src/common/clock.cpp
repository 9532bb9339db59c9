// Copyright 2026 cellkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cellkit/common/clock.hpp"

#include <time.h>

#include <cmath>

namespace cellkit {

namespace {

// How early to come out of nanosleep and start spinning on the clock.
// Large enough to swallow typical wakeup latency on a busy box.
constexpr int64_t kSpinTailUs = 150;

}  // namespace

int64_t wall_monotonic_us() {
  struct timespec ts;
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<int64_t>(ts.tv_sec) * 1000000 + ts.tv_nsec / 1000;
}

SimClock::SimClock(int64_t epoch_wall_us, double scale)
    : epoch_wall_us_(epoch_wall_us), scale_(scale) {}

SimClock SimClock::real_time() { return SimClock(wall_monotonic_us(), 1.0); }

int64_t SimClock::now_us() { return wall_to_sim_us(wall_monotonic_us()); }

int64_t SimClock::sim_to_wall_us(int64_t sim_us) const {
  return epoch_wall_us_ + static_cast<int64_t>(std::llround(sim_us / scale_));
}

int64_t SimClock::wall_to_sim_us(int64_t wall_us) const {
  return static_cast<int64_t>(std::llround((wall_us - epoch_wall_us_) * scale_));
}

void SimClock::sleep_until_us(int64_t sim_deadline_us) {
  const int64_t wall_deadline = sim_to_wall_us(sim_deadline_us);
  int64_t now = wall_monotonic_us();
  if (wall_deadline - now > kSpinTailUs) {
    struct timespec ts;
    const int64_t t = wall_deadline - kSpinTailUs;
    ts.tv_sec = t / 1000000;
    ts.tv_nsec = (t % 1000000) * 1000;
    while (clock_nanosleep(CLOCK_MONOTONIC, TIMER_ABSTIME, &ts, nullptr) != 0) {
    }
    now = wall_monotonic_us();
  }
  while (now < wall_deadline) {
    now = wall_monotonic_us();
  }
}

}  // namespace cellkit
