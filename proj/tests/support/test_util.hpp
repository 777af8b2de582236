#pragma once

#include <filesystem>
#include <string>

namespace m3::test {

std::filesystem::path fixtures_dir();
std::filesystem::path golden_dir();
std::string m3_binary();

/// Fresh directory under the system temp root; removed when the guard dies.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& path);
void spit(const std::filesystem::path& path, const std::string& content);

struct ProcessResult {
    int exit_code;
    std::string output; // stdout only
};

/// Runs a shell command, capturing stdout; stderr flows to the test log.
ProcessResult run_command(const std::string& command);

} // namespace m3::test
