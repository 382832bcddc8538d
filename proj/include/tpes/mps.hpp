#ifndef TPES_MPS_HPP
#define TPES_MPS_HPP

#include <string>

#include "tpes/milp.hpp"

namespace tpes {

// Free-format MPS with ROWS/COLUMNS/RHS/RANGES/BOUNDS sections and
// INTORG/INTEND markers around binary columns. Row and column order is the
// model's insertion order, so output is deterministic.
void write_mps(const MilpModel& model, const std::string& path);

// Reads the same dialect back; RANGES rows are split into a second row.
// Unsupported sections are reported by name.
MilpModel read_mps(const std::string& path);

// MPS-safe name: [A-Za-z0-9_.-] only, everything else mapped to '_'.
std::string sanitize_mps_name(const std::string& name);

}  // namespace tpes

#endif
