#include "udw/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "udw/errors.hpp"

namespace udw::csv {

std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& field, const std::string& context) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && *begin == ' ') ++begin;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    while (ptr < end && *ptr == ' ') ++ptr;
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(context, "cannot parse number '" + field + "'");
    }
    return v;
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), path_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    row(header);
}

void Writer::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
        throw std::logic_error("csv row width " + std::to_string(fields.size()) + " != header width " +
                               std::to_string(columns_) + " in " + path_.string());
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed for " + path_.string());
}

}  // namespace udw::csv
