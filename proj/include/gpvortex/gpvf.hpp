#pragma once

#include <string>

#include "gpvortex/field2d.hpp"

namespace gpv {

// Binary field dump, little-endian:
//   "GPVF" | version u32 | Nr u32 | Nt u32 | r0 f64 | eps f64 | Omega0 f64 | kind u8
// followed by Nr*Nt (re, im) float32 pairs, r-major.
inline constexpr unsigned kGpvfVersion = 1;

struct GpvfFile {
  DiscField field;
  double epsilon = 0.0;
  double omega0 = 0.0;
};

void write_gpvf(const std::string& path, const DiscField& f, double epsilon, double omega0);

// Rebuilds the grid from (Nr, r0): a disc grid for psi fields, an annulus
// grid starting at r0 otherwise. Values come back rounded to float32.
GpvfFile read_gpvf(const std::string& path);

}  // namespace gpv
