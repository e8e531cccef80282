#include "hyperflow/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hyperflow/errors.hpp"
#include "hyperflow/field_io.hpp"

namespace hyperflow {

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw DomainError("CsvTable: at least one column is required");
}

void CsvTable::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) {
        throw DomainError("CsvTable: row has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(columns_.size()));
    }
    rows_.push_back(values);
}

void CsvTable::write(std::ostream& out) const {
    for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

void CsvTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write(out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

}  // namespace

CsvTable load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header row");
    CsvTable table(split(line));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> values;
        for (const std::string& cell : split(line)) {
            char* end = nullptr;
            values.push_back(std::strtod(cell.c_str(), &end));
            if (end == cell.c_str()) throw std::runtime_error(path + ": bad number '" + cell + "'");
        }
        table.add_row(values);
    }
    return table;
}

}  // namespace hyperflow
