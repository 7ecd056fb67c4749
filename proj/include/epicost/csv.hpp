#pragma once

#include <string>
#include <vector>

namespace epicost {

// CSV with '#'-prefixed metadata comments, written atomically
// (temp file in the target directory, then rename).
class CsvWriter {
public:
    void comment(const std::string& line);
    void columns(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& fields);

    static std::string format(double value);
    static std::string format(std::int64_t value);

    const std::string& body() const { return body_; }
    void write_atomic(const std::string& path) const;

private:
    std::string body_;
};

}  // namespace epicost
