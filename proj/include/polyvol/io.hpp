#pragma once

// File formats.
//
//   polytope JSON   {"type": "H"|"V"|"Z"|"Vint", "A"/"b" | "V" | "G" | "V1"/"V2",
//                    "volume": optional}, matrices as row-major nested arrays
//   points CSV      one point per row, no header
//   returns CSV     date, then one return per asset
//   timeline CSV    date,indicator,state
//   edge CSV        i,j per row, 1-based nodes
//
// Numbers are written with 17 significant digits so reading back is exact.

#include "polyvol/analytics.hpp"
#include "polyvol/polytope.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace polyvol {

std::string polytope_to_json(const Polytope<double>& P);
Polytope<double> polytope_from_json(const std::string& text);

Polytope<double> read_polytope(const std::string& path);
void write_polytope(const Polytope<double>& P, const std::string& path);

/// skip_rows leading lines are dropped. drop_cols holds 1-based file columns
/// (column 1 is the date and cannot be dropped); negative entries count from
/// the end, -1 being the last column.
ReturnsMatrix read_returns(const std::string& path, int skip_rows = 0, const std::vector<int>& drop_cols = {});
ReturnsMatrix parse_returns(std::istream& in, int skip_rows = 0, const std::vector<int>& drop_cols = {});

void write_points(std::ostream& out, const Mat<double>& points);
void write_points(const std::string& path, const Mat<double>& points);

void write_timeline(std::ostream& out, const MarketTimeline& tl);
void write_timeline(const std::string& path, const MarketTimeline& tl);

/// Edges as 1-based "i,j" rows; the result is 0-based.
Dag read_edges(const std::string& path, Index nodes);
Dag parse_edges(std::istream& in, Index nodes);

/// Comma and/or newline separated numbers.
Vec<double> read_vector(const std::string& path);

/// Seven significant digits in scientific notation.
std::string format_scientific(double v);

/// Seventeen significant digits (%.17g).
std::string format_exact(double v);

}  // namespace polyvol
