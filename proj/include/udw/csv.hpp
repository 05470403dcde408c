#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace udw::csv {

// 17 significant digits, round-trips every double.
std::string format(double v);

// Splits one line on commas. No quoting: fields written by this project never contain commas.
std::vector<std::string> split(const std::string& line);

double parse_double(const std::string& field, const std::string& context);

// Writes LF-terminated rows; throws std::runtime_error when the file cannot be opened.
class Writer {
public:
    Writer(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t columns_;
};

}  // namespace udw::csv
