#pragma once

#include <iosfwd>
#include <string>

#include "mfe/grid.hpp"

namespace mfe {

// Binary field container: magic "MFE1", u32 little-endian n, then n*n
// doubles in row-major node order.
void write_field(std::ostream& os, const Field& f);
Field read_field(std::istream& is);
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

// Plain-text dump: header line "x,y,value", one node per row.
void write_csv(std::ostream& os, const Field& f);
void write_csv(const std::string& path, const Field& f);

}  // namespace mfe
