#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace heomtt {

/// Plain CSV sink: '#' metadata lines, one header row, then numeric rows in
/// 15-significant-digit scientific notation.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void meta(const std::string& key, const std::string& value);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);

    static std::string format(double x);

private:
    std::ofstream out_;
    std::string path_;
    std::size_t width_ = 0;
};

} // namespace heomtt
