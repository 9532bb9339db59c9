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

#include "cellkit/common/proc.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <stdexcept>

#include "cellkit/common/clock.hpp"

namespace cellkit {

ChildProcess ChildProcess::spawn(const std::vector<std::string>& argv,
                                 const std::string& stdio_path,
                                 bool capture_stdout) {
  if (argv.empty()) throw std::invalid_argument("spawn: empty argv");

  int pipefd[2] = {-1, -1};
  if (capture_stdout && pipe(pipefd) != 0) {
    throw std::runtime_error("spawn: pipe failed");
  }

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("spawn: fork failed");

  if (pid == 0) {
    setpgid(0, 0);
    if (!stdio_path.empty()) {
      const int fd =
          open(stdio_path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
      if (fd >= 0) {
        dup2(fd, STDOUT_FILENO);
        dup2(fd, STDERR_FILENO);
        close(fd);
      }
    }
    if (capture_stdout) {
      close(pipefd[0]);
      dup2(pipefd[1], STDOUT_FILENO);
      close(pipefd[1]);
    }
    execv(cargv[0], cargv.data());
    _exit(127);
  }

  setpgid(pid, pid);  // also from the parent side, to beat the race
  ChildProcess cp;
  cp.pid_ = pid;
  if (capture_stdout) {
    close(pipefd[1]);
    cp.stdout_fd_ = pipefd[0];
  }
  return cp;
}

bool ChildProcess::alive() {
  if (pid_ < 0 || reaped_) return false;
  int status = 0;
  const pid_t r = waitpid(pid_, &status, WNOHANG);
  if (r == pid_) {
    reaped_ = true;
    status_ = status;
    return false;
  }
  return r == 0;
}

int ChildProcess::exit_status() {
  if (!reaped_) {
    if (alive()) return -1;
  }
  if (WIFEXITED(status_)) return WEXITSTATUS(status_);
  if (WIFSIGNALED(status_)) return 128 + WTERMSIG(status_);
  return -1;
}

void ChildProcess::signal(int sig) {
  if (pid_ > 0 && !reaped_) ::kill(pid_, sig);
}

void ChildProcess::kill_now() {
  if (pid_ <= 0 || reaped_) return;
  ::kill(pid_, SIGKILL);
  int status = 0;
  waitpid(pid_, &status, 0);
  reaped_ = true;
  status_ = status;
}

int ChildProcess::wait_exit(int64_t timeout_ms) {
  const int64_t deadline =
      timeout_ms < 0 ? INT64_MAX : wall_monotonic_us() + timeout_ms * 1000;
  while (alive()) {
    if (wall_monotonic_us() >= deadline) return -1;
    usleep(2000);
  }
  return exit_status();
}

void ChildProcess::close_stdout() {
  if (stdout_fd_ >= 0) {
    close(stdout_fd_);
    stdout_fd_ = -1;
  }
}

bool read_line_fd(int fd, int64_t timeout_ms, std::string* line) {
  line->clear();
  const int64_t deadline = wall_monotonic_us() + timeout_ms * 1000;
  while (true) {
    const int64_t left_us = deadline - wall_monotonic_us();
    if (left_us <= 0) return false;
    struct pollfd pfd {fd, POLLIN, 0};
    const int pr = poll(&pfd, 1, static_cast<int>(left_us / 1000 + 1));
    if (pr < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (pr == 0) continue;
    char c;
    const ssize_t n = read(fd, &c, 1);
    if (n <= 0) return false;
    if (c == '\n') return true;
    line->push_back(c);
  }
}

std::string self_exe_path() {
  char buf[4096];
  const ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) throw std::runtime_error("readlink /proc/self/exe failed");
  buf[n] = '\0';
  return std::string(buf);
}

}  // namespace cellkit
