#include "micropolar/field_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "micropolar/errors.hpp"

namespace micropolar {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_header(std::ostream& os, const Grid& g, const char* kind) {
  os << g.nx() << ' ' << g.ny() << ' ' << format_double(g.lx()) << ' '
     << format_double(g.ly()) << ' ' << kind << '\n';
}

void write_rows(std::ostream& os, std::span<const double> values, int per_row,
                int rows) {
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < per_row; ++c, ++k) {
      if (c) os << ' ';
      os << format_double(values[k]);
    }
    os << '\n';
  }
}

struct Header {
  Grid grid;
  std::string kind;
};

bool next_line(std::istream& is, std::string& out, int& line) {
  while (std::getline(is, out)) {
    ++line;
    if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

Header read_header(std::istream& is, int& line) {
  std::string text;
  if (!next_line(is, text, line))
    throw ParseError("unexpected end of input, expected field header", line);
  std::istringstream ss(text);
  int nx = 0, ny = 0;
  double lx = 0, ly = 0;
  std::string kind, extra;
  if (!(ss >> nx >> ny >> lx >> ly >> kind) || (ss >> extra))
    throw ParseError("malformed field header '" + text + "'", line);
  try {
    return {Grid(nx, ny, lx, ly), kind};
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), line);
  }
}

std::vector<double> read_rows(std::istream& is, int per_row, int rows,
                              int& line) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(per_row) * rows);
  std::string text;
  for (int r = 0; r < rows; ++r) {
    if (!next_line(is, text, line))
      throw ParseError("unexpected end of input inside field block", line);
    const char* p = text.data();
    const char* end = p + text.size();
    int count = 0;
    while (true) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p >= end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc())
        throw ParseError("invalid number in field row", line);
      values.push_back(v);
      ++count;
      p = next;
    }
    if (count != per_row)
      throw ParseError("expected " + std::to_string(per_row) +
                           " values in row, found " + std::to_string(count),
                       line);
  }
  return values;
}

}  // namespace

void write_field(std::ostream& os, const ScalarField& s) {
  const Grid& g = s.grid();
  write_header(os, g, "cell");
  write_rows(os, s.values(), g.nx(), g.ny());
}

void write_field(std::ostream& os, const VectorField& v) {
  const Grid& g = v.grid();
  write_header(os, g, "xface");
  write_rows(os, v.x_values(), g.nx() + 1, g.ny());
  write_header(os, g, "yface");
  write_rows(os, v.y_values(), g.nx(), g.ny() + 1);
}

ScalarField read_scalar_field(std::istream& is, int& line) {
  Header h = read_header(is, line);
  if (h.kind != "cell")
    throw ParseError("expected a 'cell' block, found '" + h.kind + "'", line);
  return ScalarField(h.grid, read_rows(is, h.grid.nx(), h.grid.ny(), line));
}

VectorField read_vector_field(std::istream& is, int& line) {
  Header hx = read_header(is, line);
  if (hx.kind != "xface")
    throw ParseError("expected an 'xface' block, found '" + hx.kind + "'", line);
  auto xs = read_rows(is, hx.grid.nx() + 1, hx.grid.ny(), line);
  Header hy = read_header(is, line);
  if (hy.kind != "yface")
    throw ParseError("expected a 'yface' block, found '" + hy.kind + "'", line);
  if (!(hy.grid == hx.grid))
    throw ParseError("xface and yface blocks disagree on the grid", line);
  auto ys = read_rows(is, hy.grid.nx(), hy.grid.ny() + 1, line);
  return VectorField(hx.grid, std::move(xs), std::move(ys));
}

void save_field(const std::string& path, const ScalarField& s) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_field(os, s);
}

ScalarField load_scalar_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  int line = 0;
  return read_scalar_field(is, line);
}

}  // namespace micropolar
