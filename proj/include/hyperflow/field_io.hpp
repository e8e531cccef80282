#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hyperflow/grid.hpp"

namespace hyperflow {

// Grid dump: one JSON header line
//   {"format":"hyperflow-grid","version":1,"encoding":"text"|"binary",
//    "x1_range":[a,b],"x2_range":[c,d],"n1":N1,"n2":N2,"fields":["u1","u2"]}
// followed by the node data in storage order (index j * n1 + i).
// Text: one line per node, the field values separated by single spaces,
// printed with 17 significant digits. Binary: each field as n1*n2
// little-endian IEEE doubles, fields in header order.
enum class DumpEncoding { Text, Binary };

struct FieldDump {
    Grid grid;
    std::vector<std::string> names;
    std::vector<std::vector<double>> data;
};

void write_dump(std::ostream& out, const FieldDump& dump, DumpEncoding encoding = DumpEncoding::Text);
FieldDump read_dump(std::istream& in);

void save_dump(const std::string& path, const FieldDump& dump, DumpEncoding encoding = DumpEncoding::Text);
FieldDump load_dump(const std::string& path);

FieldDump dump_of(const MapField& u);
FieldDump dump_of(const TangentField& X);
FieldDump dump_of(const ScalarField& f, const std::string& name = "f");
MapField map_of(const FieldDump& dump);

// printf("%.17g")
std::string format_double(double v);

}  // namespace hyperflow
