#include "epicost/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "epicost/common.hpp"

namespace epicost {

void CsvWriter::comment(const std::string& line) {
    body_ += "# ";
    body_ += line;
    body_ += '\n';
}

void CsvWriter::columns(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) body_ += ',';
        body_ += fields[i];
    }
    body_ += '\n';
}

std::string CsvWriter::format(double value) {
    if (std::isnan(value)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

std::string CsvWriter::format(std::int64_t value) { return std::to_string(value); }

void CsvWriter::write_atomic(const std::string& path) const {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw parse_error("csv: cannot open " + tmp.string() + " for writing");
        out << body_;
        if (!out) throw parse_error("csv: write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw parse_error("csv: rename to " + path + " failed: " + ec.message());
}

}  // namespace epicost
