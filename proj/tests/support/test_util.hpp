#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <sys/wait.h>

namespace testutil {

// Self-deleting scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "safeseg-test") {
    std::random_device rd;
    std::uniform_int_distribution<unsigned> suffix(0, 0xFFFFFF);
    for (int attempt = 0; attempt < 16; ++attempt) {
      auto candidate = std::filesystem::temp_directory_path() /
                       (tag + "-" + std::to_string(suffix(rd)));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create a temp directory");
  }

  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("failed to write " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("failed to read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

// Runs a shell command and captures its combined output.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed for: " + command);
  char buffer[4096];
  std::size_t got;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0)
    result.output.append(buffer, got);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Path of the installed CLI binary, injected by the test harness.
inline std::string cli_binary() {
  if (const char* env = std::getenv("SAFESEG_BIN")) return env;
#ifdef SAFESEG_BIN_PATH
  return SAFESEG_BIN_PATH;
#else
  throw std::runtime_error("SAFESEG_BIN is not set");
#endif
}

// Repository root, for the bundled hierarchy config.
inline std::filesystem::path source_root() {
#ifdef SAFESEG_SOURCE_DIR
  return SAFESEG_SOURCE_DIR;
#else
  if (const char* env = std::getenv("SAFESEG_SOURCE"))
    return env;
  throw std::runtime_error("SAFESEG_SOURCE is not set");
#endif
}

inline std::filesystem::path bundled_config() {
  return source_root() / "configs" / "iddaw.json";
}

}  // namespace testutil
