/**
 * @file field_io.hpp
 * @brief Plain-text grid field format.
 *
 * A field block is a header line `nx ny lx ly kind` followed by row-major
 * values, one grid row per line (south to north), written with 17
 * significant digits so that values round-trip exactly. `kind` is one of
 *
 *   cell   nx values per row, ny rows
 *   xface  nx+1 values per row, ny rows
 *   yface  nx values per row, ny+1 rows
 *
 * A VectorField is an xface block followed by a yface block. Several blocks
 * may be concatenated in one stream.
 */
#pragma once

#include <iosfwd>
#include <string>

#include "micropolar/grid.hpp"

namespace micropolar {

void write_field(std::ostream& os, const ScalarField& s);
void write_field(std::ostream& os, const VectorField& v);

/// Reads the next `cell` block. `line` tracks the 1-based line number for
/// ParseError messages and is advanced past the block.
ScalarField read_scalar_field(std::istream& is, int& line);
VectorField read_vector_field(std::istream& is, int& line);

/// Convenience wrappers for whole files.
void save_field(const std::string& path, const ScalarField& s);
ScalarField load_scalar_field(const std::string& path);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace micropolar
