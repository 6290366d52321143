#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nafl/simulate.hpp"

namespace nafl::sim {

/// Column names plus numeric rows, angles in degrees.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/**
 * Flattens a trace into CSV columns. Plants with full_trace set get
 *
 *   t, states, <control>_cmd, <control>_act, <output>r, e<output>, h1..hm,
 *   Vs, det_dvdu, eq40_bound, pinv_active
 *
 * and all others get t, states, controls, e<output>, Vs. Angle columns carry
 * a _deg suffix.
 */
CsvTable trace_table(const Trace& trace);

/// Writes the table with %.17e formatting. Throws ErrorKind::File on I/O failure.
void write_csv(const CsvTable& table, const std::filesystem::path& path);
void write_trace(const Trace& trace, const std::filesystem::path& path);

/// Parses a file produced by write_csv. Throws ErrorKind::File.
CsvTable read_csv(const std::filesystem::path& path);

} // namespace nafl::sim
