#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "medoidjl/geometry.hpp"

namespace medoidjl {

// Point-set CSV: a `# dim=<d>` header line, then one `w,x1,...,xd` row per
// stored point. Values are written in shortest round-trip form, so reading
// back a written file reproduces every coordinate bit for bit.

void write_pointset_csv(std::ostream& out, const WeightedPointSet& set);
WeightedPointSet read_pointset_csv(std::istream& in);

void save_pointset_csv(const std::string& path, const WeightedPointSet& set);
WeightedPointSet load_pointset_csv(const std::string& path);

/// Shortest decimal form that parses back to exactly `x`.
std::string format_double(double x);
double parse_double(std::string_view text);

}  // namespace medoidjl
