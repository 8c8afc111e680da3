#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "patmine/corpus.hpp"

namespace patmine::testing {

/// A scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("patmine-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline SourceFile source(const std::string& path, const std::string& content, const std::string& project = "p") {
    return SourceFile{project, path, content};
}

/// Manifest from in-memory files, sorted as ingest_corpus would sort it.
inline CorpusManifest manifest_of(std::vector<SourceFile> files) {
    CorpusManifest m;
    m.files = std::move(files);
    std::sort(m.files.begin(), m.files.end(),
              [](const SourceFile& a, const SourceFile& b) { return a.key() < b.key(); });
    return m;
}

inline std::filesystem::path golden_dir() { return std::filesystem::path(PATMINE_FIXTURE_DIR) / "golden"; }

}  // namespace patmine::testing
