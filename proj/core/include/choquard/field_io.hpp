#pragma once

#include <choquard/grid.hpp>

#include <iosfwd>
#include <string>

namespace choquard {

/// Text format: a header line "kind radius resolution [breakpoints...]"
/// followed by the nodal values, one per line, 17 significant digits.
void write_field(const GridField& u, std::ostream& out);
GridField read_field(std::istream& in);

void save_field(const GridField& u, const std::string& path);
GridField load_field(const std::string& path);

}  // namespace choquard
