#include "fklattice/io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fklattice {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string surface_csv(const ValueSurface& surface) {
    std::string out = "t,x,re_v,im_v\n";
    for (const ValueSurface::Layer& layer : surface.layers) {
        for (std::size_t j = 0; j < layer.nodes.size(); ++j) {
            out += format_g17(layer.t);
            out += ',';
            out += format_g17(layer.nodes[j]);
            out += ',';
            out += format_g17(layer.values[static_cast<long>(j)].real());
            out += ',';
            out += format_g17(layer.values[static_cast<long>(j)].imag());
            out += '\n';
        }
    }
    return out;
}

std::string convergence_csv(const ConvergenceResult& result) {
    std::string out = "n,q_re,q_im,diff_abs\n";
    for (const ConvergencePoint& pt : result.points) {
        out += format_g17(pt.n);
        out += ',';
        out += format_g17(pt.q_n.real());
        out += ',';
        out += format_g17(pt.q_n.imag());
        out += ',';
        out += format_g17(pt.diff_abs);
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("parse_csv: empty input");
    std::istringstream head(line);
    std::string cell;
    while (std::getline(head, cell, ','))
        table.header.push_back(cell);

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            double v = 0.0;
            const auto res = std::from_chars(line.data() + pos, line.data() + comma, v);
            if (res.ec != std::errc() || res.ptr != line.data() + comma)
                throw std::invalid_argument("parse_csv: bad numeric cell '" +
                                            line.substr(pos, comma - pos) + "'");
            row.push_back(v);
            pos = comma + 1;
        }
        if (row.size() != table.header.size())
            throw std::invalid_argument("parse_csv: ragged row");
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string emit_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const std::vector<double>& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_g17(row[i]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace fklattice
