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

#pragma once

#include <cstdint>
#include <memory>

namespace cellkit {

// Time source used by everything that needs "now" or a timed wait.
//
// Production code uses SimClock (scaled monotonic time shared across
// processes); tests that need determinism use FakeClock.
class Clock {
 public:
  virtual ~Clock() = default;

  // Microseconds on this clock's timeline.
  virtual int64_t now_us() = 0;

  // Blocks until now_us() >= deadline_us. A FakeClock jumps instead.
  virtual void sleep_until_us(int64_t deadline_us) = 0;

  // The CLOCK_MONOTONIC instant at which this timeline reaches t_us. Lets
  // condition variables wait out a deadline given on this clock.
  virtual int64_t to_wall_us(int64_t t_us) { return t_us; }

  void sleep_for_us(int64_t dur_us) { sleep_until_us(now_us() + dur_us); }
};

// Raw CLOCK_MONOTONIC in microseconds. Shared by all processes on the host.
int64_t wall_monotonic_us();

// Simulated time: sim_us = (wall_us - epoch_wall_us) * scale.
//
// Every process in one cell run is handed the same epoch and scale, so all
// periods, timeouts and thresholds expressed in sim time line up across
// process boundaries. scale == 1 is real time.
//
// sleep_until_us() uses an absolute-deadline nanosleep with a short spin
// tail so that high-rate periodic loops (the 1 kHz tick) hit their slots.
class SimClock : public Clock {
 public:
  SimClock(int64_t epoch_wall_us, double scale);

  // Real time, epoch = now.
  static SimClock real_time();

  int64_t now_us() override;
  void sleep_until_us(int64_t sim_deadline_us) override;
  int64_t to_wall_us(int64_t t_us) override { return sim_to_wall_us(t_us); }

  int64_t epoch_wall_us() const { return epoch_wall_us_; }
  double scale() const { return scale_; }

  int64_t sim_to_wall_us(int64_t sim_us) const;
  int64_t wall_to_sim_us(int64_t wall_us) const;

 private:
  int64_t epoch_wall_us_;
  double scale_;
};

// Manually advanced clock for unit tests.
class FakeClock : public Clock {
 public:
  explicit FakeClock(int64_t start_us = 0) : now_(start_us) {}

  int64_t now_us() override { return now_; }
  void sleep_until_us(int64_t deadline_us) override {
    if (deadline_us > now_) now_ = deadline_us;
  }
  void advance_us(int64_t d) { now_ += d; }

 private:
  int64_t now_;
};

}  // namespace cellkit
