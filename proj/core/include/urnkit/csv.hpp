#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "urnkit/diagnostics.hpp"
#include "urnkit/exact.hpp"
#include "urnkit/urn.hpp"

namespace urnkit {

/// Shortest representation with 17 significant digits; '.' decimal point,
/// no grouping. Stable across runs, suitable for golden files.
std::string format_double(double x);

/// Effective-config comment block: "# key = value" lines, sorted by key.
void write_provenance(std::ostream& out, const std::map<std::string, std::string>& provenance);

/// Columns: index,r,g,colour. Fine dumps carry the colour drawn at each tick
/// (blank on the initial row); coarse dumps leave the colour blank.
void write_path_csv(std::ostream& out, const FinePath& path,
                    const std::map<std::string, std::string>& provenance);
void write_path_csv(std::ostream& out, const CoarsePath& path,
                    const std::map<std::string, std::string>& provenance);

/// Columns: k,r,g,colour,N,M,X,B (B blank when the square tail diverges).
void write_trace_csv(std::ostream& out, const FinePath& path, const DiagnosticsTrace& trace,
                     const std::map<std::string, std::string>& provenance);

/// Columns: r,g,probability,fraction (fraction blank in float mode).
void write_distribution_csv(std::ostream& out, const ExactDistribution& dist,
                            const std::map<std::string, std::string>& provenance);

}  // namespace urnkit
