#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sepmp {

// Shortest round-trip decimal representation (std::to_chars), so CSV output
// is byte-identical across runs and worker counts.
std::string format_double(double x);

// Minimal CSV writer: caller supplies header once, then rows of cells.
class CsvWriter {
public:
    explicit CsvWriter(std::string path);
    void header(const std::vector<std::string>& cols);
    void row(const std::vector<std::string>& cells);
    void close();
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string buffer_;
    bool closed_ = false;
};

// FNV-1a of a byte string; stamps configs into run summaries.
std::uint64_t fnv1a(const std::string& data);

// Key-value run summary (one "key=value" per line).
struct RunSummary {
    std::vector<std::pair<std::string, std::string>> fields;
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void write(const std::string& path) const;
};

std::string version_string();

}  // namespace sepmp
