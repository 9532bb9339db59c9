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

#include <sys/types.h>

#include <cstdint>
#include <string>
#include <vector>

namespace cellkit {

// A spawned child. Each child is put in its own process group so that
// killing one component never takes out its siblings or the parent.
class ChildProcess {
 public:
  ChildProcess() = default;

  // argv[0] is the executable path. If stdio_path is non-empty, the child's
  // stdout and stderr are appended to that file. If capture_stdout is true,
  // stdout is piped back instead and readable via stdout_fd().
  static ChildProcess spawn(const std::vector<std::string>& argv,
                            const std::string& stdio_path = "",
                            bool capture_stdout = false);

  pid_t pid() const { return pid_; }
  int stdout_fd() const { return stdout_fd_; }

  // True while the process has not exited. Reaps on exit.
  bool alive();

  // Exit code if exited normally, 128+signal if killed, -1 if still running.
  int exit_status();

  void signal(int sig);

  // SIGKILL and reap.
  void kill_now();

  // Waits up to timeout_ms (-1 = forever) for exit. Returns exit_status()
  // or -1 if still running when the timeout hits.
  int wait_exit(int64_t timeout_ms = -1);

  void close_stdout();

 private:
  pid_t pid_ = -1;
  int stdout_fd_ = -1;
  bool reaped_ = false;
  int status_ = -1;
};

// Reads one '\n'-terminated line from fd, waiting up to timeout_ms.
// Returns false on timeout or EOF before a full line.
bool read_line_fd(int fd, int64_t timeout_ms, std::string* line);

// Absolute path of the running executable (/proc/self/exe).
std::string self_exe_path();

}  // namespace cellkit
