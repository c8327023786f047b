#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace fsci::csv {

/// Minimal RFC 4180 reader: quoted fields, doubled quotes, embedded newlines.
/// Tolerates CRLF and a leading UTF-8 BOM.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads the next record. Returns false at end of input.
    /// Throws fsci::Error(MalformedCsv) on an unterminated quote.
    bool next(std::vector<std::string>& fields);

    /// 1-based line number where the last returned record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
    bool first_ = true;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string_view trim(std::string_view s) noexcept;

} // namespace fsci::csv
