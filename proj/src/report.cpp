#include "sepmp/report.hpp"

#include <charconv>
#include <fstream>

#include "sepmp/errors.hpp"

namespace sepmp {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {}

void CsvWriter::header(const std::vector<std::string>& cols) { row(cols); }

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += cells[i];
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path_);
    out << buffer_;
    closed_ = true;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void RunSummary::add(const std::string& key, const std::string& value) {
    fields.emplace_back(key, value);
}
void RunSummary::add(const std::string& key, double value) {
    fields.emplace_back(key, format_double(value));
}

void RunSummary::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path);
    for (const auto& [k, v] : fields) out << k << '=' << v << '\n';
}

std::string version_string() { return "sepmp-0.1.0"; }

}  // namespace sepmp
