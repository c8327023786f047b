#include "fsci/csv.hpp"

#include "fsci/error.hpp"

namespace fsci::csv {

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return false;
    if (first_) {
        first_ = false;
        if (c == 0xEF) {
            // UTF-8 BOM
            in_.get();
            in_.get();
            c = in_.get();
            if (c == std::char_traits<char>::eof()) return false;
        }
    }
    record_line_ = line_;

    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (;; c = in_.get()) {
        if (c == std::char_traits<char>::eof()) {
            if (quoted) throw Error(ErrorCode::MalformedCsv, "unterminated quote starting at line " + std::to_string(record_line_));
            fields.push_back(std::move(field));
            return true;
        }
        const char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line_;
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"' && field.empty() && !was_quoted) {
            quoted = true;
            was_quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else if (ch == '\n') {
            ++line_;
            fields.push_back(std::move(field));
            return true;
        } else if (ch == '\r' && in_.peek() == '\n') {
            // swallowed; the LF terminates the record
        } else {
            field.push_back(ch);
        }
    }
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

std::string_view trim(std::string_view s) noexcept {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

} // namespace fsci::csv
