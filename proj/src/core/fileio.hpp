#pragma once

#include <string>

#include "core/raster.hpp"

namespace ptcov {

// Point patterns as CSV with header `x,y`.
PointPattern read_pattern_csv(const std::string& path, Window window);
void write_pattern_csv(const PointPattern& pattern, const std::string& path);

// Scalar fields in Esri ASCII grid format (north-up rows). The field window
// is the full grid rectangle.
ScalarField read_asc(const std::string& path);
void write_asc(const ScalarField& field, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace ptcov
