#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hyperflow {

// Comma-separated table with a header row; values are printed with 17
// significant digits so that a rerun reproduces the file byte for byte.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(const std::vector<double>& values);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<double>>& data() const { return rows_; }

    void write(std::ostream& out) const;
    void save(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

// Parses a file written by CsvTable::save.
CsvTable load_csv(const std::string& path);

}  // namespace hyperflow
