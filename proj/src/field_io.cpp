#include "hyperflow/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hyperflow/errors.hpp"

namespace hyperflow {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_dump(std::ostream& out, const FieldDump& dump, DumpEncoding encoding) {
    const std::size_t n = dump.grid.size();
    if (dump.names.size() != dump.data.size()) throw DomainError("write_dump: names and data differ in length");
    for (const auto& d : dump.data) {
        if (d.size() != n) throw DomainError("write_dump: field size does not match the grid");
    }
    nlohmann::ordered_json h;
    h["format"] = "hyperflow-grid";
    h["version"] = 1;
    h["encoding"] = encoding == DumpEncoding::Text ? "text" : "binary";
    h["x1_range"] = {dump.grid.x1_min, dump.grid.x1_max};
    h["x2_range"] = {dump.grid.x2_min, dump.grid.x2_max};
    h["n1"] = dump.grid.n1;
    h["n2"] = dump.grid.n2;
    h["fields"] = dump.names;
    out << h.dump() << '\n';
    if (encoding == DumpEncoding::Text) {
        std::string line;
        for (std::size_t k = 0; k < n; ++k) {
            line.clear();
            for (std::size_t f = 0; f < dump.data.size(); ++f) {
                if (f) line += ' ';
                line += format_double(dump.data[f][k]);
            }
            line += '\n';
            out << line;
        }
    } else {
        static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");
        for (const auto& d : dump.data) {
            out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(n * sizeof(double)));
        }
    }
    if (!out) throw std::runtime_error("write_dump: stream error");
}

FieldDump read_dump(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw DomainError("read_dump: missing header");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("read_dump: bad header: ") + e.what());
    }
    if (h.value("format", "") != "hyperflow-grid" || h.value("version", 0) != 1) {
        throw DomainError("read_dump: unsupported format or version");
    }
    FieldDump dump;
    const auto r1 = h.at("x1_range").get<std::vector<double>>();
    const auto r2 = h.at("x2_range").get<std::vector<double>>();
    if (r1.size() != 2 || r2.size() != 2) throw DomainError("read_dump: ranges must have two entries");
    dump.grid = Grid::make(r1[0], r1[1], r2[0], r2[1], h.at("n1").get<int>(), h.at("n2").get<int>());
    dump.names = h.at("fields").get<std::vector<std::string>>();
    const std::size_t n = dump.grid.size();
    dump.data.assign(dump.names.size(), std::vector<double>(n));
    const std::string enc = h.at("encoding").get<std::string>();
    if (enc == "text") {
        std::string line;
        for (std::size_t k = 0; k < n; ++k) {
            if (!std::getline(in, line)) throw DomainError("read_dump: truncated text data");
            const char* p = line.c_str();
            for (std::size_t f = 0; f < dump.names.size(); ++f) {
                char* end = nullptr;
                dump.data[f][k] = std::strtod(p, &end);
                if (end == p) throw DomainError("read_dump: malformed number at node " + std::to_string(k));
                p = end;
            }
        }
    } else if (enc == "binary") {
        for (auto& d : dump.data) {
            in.read(reinterpret_cast<char*>(d.data()), static_cast<std::streamsize>(n * sizeof(double)));
            if (!in) throw DomainError("read_dump: truncated binary data");
        }
    } else {
        throw DomainError("read_dump: unknown encoding " + enc);
    }
    return dump;
}

void save_dump(const std::string& path, const FieldDump& dump, DumpEncoding encoding) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_dump: cannot open " + path);
    write_dump(out, dump, encoding);
}

FieldDump load_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_dump: cannot open " + path);
    return read_dump(in);
}

FieldDump dump_of(const MapField& u) { return {u.grid, {"u1", "u2"}, {u.u1, u.u2}}; }
FieldDump dump_of(const TangentField& X) { return {X.grid, {"X1", "X2"}, {X.X1, X.X2}}; }
FieldDump dump_of(const ScalarField& f, const std::string& name) { return {f.grid, {name}, {f.values}}; }

MapField map_of(const FieldDump& dump) {
    if (dump.names.size() != 2 || dump.names[0] != "u1" || dump.names[1] != "u2") {
        throw DomainError("map_of: dump does not hold fields u1, u2");
    }
    MapField u(dump.grid);
    u.u1 = dump.data[0];
    u.u2 = dump.data[1];
    return u;
}

}  // namespace hyperflow
