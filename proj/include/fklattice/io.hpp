#pragma once

#include <string>
#include <vector>

#include "fklattice/engine.hpp"

namespace fklattice {

/// Fixed 17-significant-digit decimal rendering; round-trips doubles
/// exactly and is locale-independent.
std::string format_g17(double v);

/// Value surface as `t,x,re_v,im_v` rows, one per (layer, node), layer 0
/// first. LF line endings.
std::string surface_csv(const ValueSurface& surface);

/// Convergence table as `n,q_re,q_im,diff_abs` rows.
std::string convergence_csv(const ConvergenceResult& result);

/// Generic numeric CSV with a header row, as produced by the emitters.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable parse_csv(const std::string& text);
std::string emit_csv(const CsvTable& table);

}  // namespace fklattice
