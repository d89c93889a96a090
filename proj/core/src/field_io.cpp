#include <choquard/field_io.hpp>

#include <choquard/errors.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace choquard {

namespace {
std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

void write_field(const GridField& u, std::ostream& out) {
  const Grid& g = u.grid();
  out << to_string(g.kind()) << ' ' << g17(g.radius()) << ' ' << g.resolution();
  for (double b : g.breakpoints()) out << ' ' << g17(b);
  out << '\n';
  for (double v : u.values()) out << g17(v) << '\n';
}

GridField read_field(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) fail(ErrorKind::validation, "field file has no header");
  std::istringstream h(header);
  std::string kind;
  double radius = 0.0;
  int resolution = 0;
  if (!(h >> kind >> radius >> resolution)) fail(ErrorKind::validation, "malformed field header");
  std::vector<double> breakpoints;
  for (double b; h >> b;) breakpoints.push_back(b);
  if (!h.eof()) fail(ErrorKind::validation, "malformed field header");

  const GridKind k = grid_kind_from_string(kind);
  GridPtr grid;
  if (k == GridKind::radial) {
    grid = build_radial_grid(radius, resolution, breakpoints);
  } else {
    if (!breakpoints.empty()) fail(ErrorKind::validation, "cartesian fields have no breakpoints");
    grid = build_grid(k, radius, resolution);
  }
  std::vector<double> values;
  values.reserve(grid->size());
  for (std::string tok; in >> tok;) {
    // strtod also reads the nan/inf spellings, which GridField then rejects
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (*end != '\0') fail(ErrorKind::validation, "bad field value '" + tok + "'");
    values.push_back(v);
  }
  if (values.size() != grid->size())
    fail(ErrorKind::validation, "field file holds " + std::to_string(values.size()) +
                                    " values for a grid of " + std::to_string(grid->size()));
  return GridField(grid, std::move(values));
}

void save_field(const GridField& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::validation, "cannot write '" + path + "'");
  write_field(u, out);
  if (!out) fail(ErrorKind::validation, "write to '" + path + "' failed");
}

GridField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::validation, "cannot read '" + path + "'");
  return read_field(in);
}

}  // namespace choquard
