#pragma once

// Text formats: CSV for event logs and grid fields, JSON for configuration
// and reports. Byte-level layouts are documented in docs/formats.md.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pdmplab/analysis.hpp"
#include "pdmplab/grid_field.hpp"
#include "pdmplab/reduction.hpp"
#include "pdmplab/simulate.hpp"
#include "pdmplab/solver.hpp"

namespace pdmplab {

/// Writes `# params ...` and `# seed ...` comment lines (after any extra
/// `comments`), the column header time,x1,x2,regime, the initial state as
/// a row at time 0, then one row per event.
void write_event_log(std::ostream& os, const EventLog& log,
                     const std::vector<std::string>& comments = {});
/// Inverse of write_event_log. Holding times are recovered as differences
/// of consecutive switch times. Throws ValidationError on malformed input.
EventLog read_event_log(std::istream& is);

/// `# ...` comment lines, the 4-line header (kind, n1, n2, bounds), then
/// rows i1,i2,value0,value1 in storage order.
void write_grid_field(std::ostream& os, const GridField& field,
                      const std::vector<std::string>& comments = {});
GridField read_grid_field(std::istream& is);

void save_event_log(const std::string& path, const EventLog& log,
                    const std::vector<std::string>& comments = {});
EventLog load_event_log(const std::string& path);
void save_grid_field(const std::string& path, const GridField& field,
                     const std::vector<std::string>& comments = {});
GridField load_grid_field(const std::string& path);

std::string to_json(const SolverConfig& cfg);
/// Keys absent from the document keep their value in `base`.
SolverConfig solver_config_from_json(std::string_view text, SolverConfig base = {});

std::string to_json(const GeneralSystem& sys);
/// Keys: A (4 numbers, row-major), b0, b1 (2 numbers each), lambda0, lambda1.
GeneralSystem general_system_from_json(std::string_view text);

std::string to_json(const Conjugacy& c);
std::string to_json(const RegimeReport& r);
std::string to_json(const ScalingFit& f);

std::string read_text_file(const std::string& path);

}  // namespace pdmplab
