#include "gpvortex/gpvf.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gpvortex/errors.hpp"

namespace gpv {

static_assert(std::endian::native == std::endian::little, "GPVF I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ParameterError("GPVF: truncated file");
  return v;
}

}  // namespace

void write_gpvf(const std::string& path, const DiscField& f, double epsilon, double omega0) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ParameterError("cannot open " + path + " for writing");
  os.write("GPVF", 4);
  put<std::uint32_t>(os, kGpvfVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.Nr));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.Nt));
  put<double>(os, f.grid.r0());
  put<double>(os, epsilon);
  put<double>(os, omega0);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(f.kind));
  std::vector<float> buf(2 * f.values.size());
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    buf[2 * k] = static_cast<float>(f.values[k].real());
    buf[2 * k + 1] = static_cast<float>(f.values[k].imag());
  }
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!os) throw ParameterError("write failed: " + path);
}

GpvfFile read_gpvf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParameterError("missing input artifact: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "GPVF", 4) != 0) throw ParameterError("GPVF: bad magic in " + path);
  const auto version = get<std::uint32_t>(is);
  if (version != kGpvfVersion) throw ParameterError("GPVF: unsupported version");
  const int Nr = static_cast<int>(get<std::uint32_t>(is));
  const int Nt = static_cast<int>(get<std::uint32_t>(is));
  const double r0 = get<double>(is);
  GpvfFile out;
  out.epsilon = get<double>(is);
  out.omega0 = get<double>(is);
  const auto kind = get<std::uint8_t>(is);
  if (kind > 2) throw ParameterError("GPVF: unknown field kind");
  out.field.kind = static_cast<FieldKind>(kind);
  const Domain dom = out.field.kind == FieldKind::Psi ? Domain::Disc : Domain::Annulus;
  out.field.grid = make_polar_grid(make_radial_grid(dom, r0, Nr), Nt);
  std::vector<float> buf(2 * out.field.grid.size());
  if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float))))
    throw ParameterError("GPVF: truncated payload");
  out.field.values.resize(out.field.grid.size());
  for (std::size_t k = 0; k < out.field.values.size(); ++k) out.field.values[k] = {buf[2 * k], buf[2 * k + 1]};
  return out;
}

}  // namespace gpv
