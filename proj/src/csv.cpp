#include "heomtt/csv.hpp"

#include <cstdio>

#include "heomtt/errors.hpp"

namespace heomtt {

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_)
        throw ConfigError("cannot write '" + path + "'");
}

void CsvWriter::meta(const std::string& key, const std::string& value) { out_ << "# " << key << ": " << value << '\n'; }

void CsvWriter::header(const std::vector<std::string>& columns) {
    width_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (width_ && values.size() != width_)
        throw std::logic_error("csv row width does not match the header of " + path_);
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format(values[i]);
    out_ << '\n';
}

std::string CsvWriter::format(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.14e", x);
    return buf;
}

} // namespace heomtt
