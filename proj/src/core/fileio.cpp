#include "core/fileio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/common.hpp"

namespace ptcov {
namespace {

constexpr double kNoData = -9999.0;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

PointPattern read_pattern_csv(const std::string& path, Window window) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open pattern file: " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::data, "empty pattern file: " + path);
  std::string header = lower(trim(line));
  if (header != "x,y")
    fail(ErrorKind::data, "pattern file " + path + " must start with header 'x,y'");
  std::vector<Vec2> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    std::istringstream row(t);
    std::string sx, sy;
    if (!std::getline(row, sx, ',') || !std::getline(row, sy))
      fail(ErrorKind::data, path + ": malformed row at line " + std::to_string(lineno));
    try {
      points.push_back(Vec2{std::stod(sx), std::stod(sy)});
    } catch (const std::exception&) {
      fail(ErrorKind::data, path + ": non-numeric coordinates at line " + std::to_string(lineno));
    }
  }
  try {
    return make_pattern(std::move(points), std::move(window));
  } catch (const Error& e) {
    fail(ErrorKind::data, path + ": " + e.what());
  }
}

void write_pattern_csv(const PointPattern& pattern, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write pattern file: " + path);
  out << "x,y\n";
  for (const Vec2& p : pattern.points)
    out << format_double(p.x) << ',' << format_double(p.y) << '\n';
  if (!out) fail(ErrorKind::io, "failed while writing " + path);
}

ScalarField read_asc(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open grid file: " + path);
  long ncols = -1, nrows = -1;
  double xll = 0.0, yll = 0.0, cellsize = 0.0, nodata = kNoData;
  bool have_nodata = false;
  // Header: up to six "key value" lines before the data block.
  std::streampos data_start = in.tellg();
  std::string key;
  for (int i = 0; i < 6; ++i) {
    data_start = in.tellg();
    if (!(in >> key)) fail(ErrorKind::data, path + ": truncated grid header");
    std::string k = lower(key);
    double value;
    if (k == "ncols" || k == "nrows" || k == "xllcorner" || k == "yllcorner" ||
        k == "cellsize" || k == "nodata_value") {
      if (!(in >> value)) fail(ErrorKind::data, path + ": bad value for " + key);
      if (k == "ncols")
        ncols = static_cast<long>(value);
      else if (k == "nrows")
        nrows = static_cast<long>(value);
      else if (k == "xllcorner")
        xll = value;
      else if (k == "yllcorner")
        yll = value;
      else if (k == "cellsize")
        cellsize = value;
      else {
        nodata = value;
        have_nodata = true;
      }
    } else {
      in.seekg(data_start);  // start of the value block
      break;
    }
  }
  if (ncols < 1 || nrows < 1 || !(cellsize > 0.0))
    fail(ErrorKind::data, path + ": grid header missing ncols/nrows/cellsize");
  GridSpec grid{Vec2{xll, yll}, cellsize, static_cast<int>(ncols), static_cast<int>(nrows)};
  Window window =
      Window::rectangle(xll, yll, xll + cellsize * ncols, yll + cellsize * nrows);
  ScalarField field(grid, window);
  // Rows are stored north-up: the first row in the file is the top row.
  for (long r = nrows - 1; r >= 0; --r) {
    for (long c = 0; c < ncols; ++c) {
      double v;
      if (!(in >> v)) fail(ErrorKind::data, path + ": grid data block is truncated");
      if (have_nodata && v == nodata) v = std::nan("");
      field.at(static_cast<int>(r), static_cast<int>(c)) = v;
    }
  }
  return field;
}

void write_asc(const ScalarField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write grid file: " + path);
  const GridSpec& g = field.grid();
  out << "ncols " << g.ncols << "\n";
  out << "nrows " << g.nrows << "\n";
  out << "xllcorner " << format_double(g.origin.x) << "\n";
  out << "yllcorner " << format_double(g.origin.y) << "\n";
  out << "cellsize " << format_double(g.cell) << "\n";
  out << "NODATA_value " << format_double(kNoData) << "\n";
  for (int r = g.nrows - 1; r >= 0; --r) {
    for (int c = 0; c < g.ncols; ++c) {
      double v = field.at(r, c);
      if (std::isnan(v)) v = kNoData;
      out << format_double(v);
      out << (c + 1 == g.ncols ? '\n' : ' ');
    }
  }
  if (!out) fail(ErrorKind::io, "failed while writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write file: " + path);
  out << contents;
  if (!out) fail(ErrorKind::io, "failed while writing " + path);
}

}  // namespace ptcov
