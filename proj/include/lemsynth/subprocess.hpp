#pragma once

// A child process with piped stdin/stdout and deadline-bounded reads.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lemsynth {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Subprocess {
public:
  using Clock = std::chrono::steady_clock;

  explicit Subprocess(const std::vector<std::string>& argv) {
    static const bool sigpipe_ignored = [] {
      ::signal(SIGPIPE, SIG_IGN);
      return true;
    }();
    (void)sigpipe_ignored;
    if (argv.empty()) throw IoError("empty command line");
    int in[2], out[2], err[2];
    if (::pipe2(in, O_CLOEXEC) != 0) throw IoError(std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(out, O_CLOEXEC) != 0) {
      close_pair(in);
      throw IoError(std::string("pipe: ") + std::strerror(errno));
    }
    // Used to report a failed exec to the parent.
    if (::pipe2(err, O_CLOEXEC) != 0) {
      close_pair(in);
      close_pair(out);
      throw IoError(std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_ = ::fork();
    if (pid_ < 0) {
      close_pair(in);
      close_pair(out);
      close_pair(err);
      throw IoError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      ::dup2(in[0], STDIN_FILENO);
      ::dup2(out[1], STDOUT_FILENO);
      int devnull = ::open("/dev/null", O_WRONLY);
      if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
      ::execvp(args[0], args.data());
      int e = errno;
      ssize_t ignored = ::write(err[1], &e, sizeof e);
      (void)ignored;
      ::_exit(127);
    }
    ::close(in[0]);
    ::close(out[1]);
    ::close(err[1]);
    in_ = in[1];
    out_ = out[0];
    int child_errno = 0;
    ssize_t n;
    do {
      n = ::read(err[0], &child_errno, sizeof child_errno);
    } while (n < 0 && errno == EINTR);
    ::close(err[0]);
    if (n == static_cast<ssize_t>(sizeof child_errno)) {
      reap(true);
      throw IoError("cannot execute '" + argv[0] + "': " + std::strerror(child_errno));
    }
  }

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  ~Subprocess() { reap(true); }

  bool alive() const { return pid_ > 0; }

  void write(const std::string& data) {
    if (in_ < 0) throw IoError("solver stdin closed");
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(in_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw IoError(std::string("write to solver: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  // Reads until `complete(buffer)` holds or the deadline passes. Returns
  // nullopt on timeout; throws on EOF.
  template <class Pred>
  std::optional<std::string> read_until(Pred complete, Clock::time_point deadline) {
    for (;;) {
      if (complete(buf_)) {
        std::string out;
        out.swap(buf_);
        return out;
      }
      auto now = Clock::now();
      if (now >= deadline) return std::nullopt;
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      pollfd p{out_, POLLIN, 0};
      int r = ::poll(&p, 1, static_cast<int>(std::min<long long>(ms + 1, 1 << 30)));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw IoError(std::string("poll: ") + std::strerror(errno));
      }
      if (r == 0) continue;
      char chunk[65536];
      ssize_t n = ::read(out_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw IoError(std::string("read from solver: ") + std::strerror(errno));
      }
      if (n == 0) throw IoError("solver closed its output" + (buf_.empty() ? std::string() : ": " + buf_));
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  // Leftover text after the last complete read.
  std::string take_buffer() {
    std::string out;
    out.swap(buf_);
    return out;
  }
  void unread(std::string text) { buf_ = std::move(text) + buf_; }

  void kill() { reap(true); }

private:
  static void close_pair(int p[2]) {
    ::close(p[0]);
    ::close(p[1]);
  }

  void reap(bool force) {
    if (in_ >= 0) {
      ::close(in_);
      in_ = -1;
    }
    if (out_ >= 0) {
      ::close(out_);
      out_ = -1;
    }
    if (pid_ > 0) {
      if (force) ::kill(pid_, SIGKILL);
      int status = 0;
      while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
      }
      pid_ = -1;
    }
  }

  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::string buf_;
};

}  // namespace lemsynth
