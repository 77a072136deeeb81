#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "angular_fft.hpp"
#include "gpvortex/errors.hpp"
#include "gpvortex/field2d.hpp"

namespace gpv {

namespace detail {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

AngularFFT::AngularFFT(int rows, int Nt) : rows_(rows), nt_(Nt) {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_complex* a = fftw_alloc_complex(static_cast<std::size_t>(rows) * Nt);
  fftw_complex* b = fftw_alloc_complex(static_cast<std::size_t>(rows) * Nt);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  int n[1] = {Nt};
  fwd_ = fftw_plan_many_dft(1, n, rows, a, nullptr, 1, Nt, b, nullptr, 1, Nt, FFTW_FORWARD, flags);
  bwd_ = fftw_plan_many_dft(1, n, rows, a, nullptr, 1, Nt, b, nullptr, 1, Nt, FFTW_BACKWARD, flags);
  fftw_free(a);
  fftw_free(b);
  if (!fwd_ || !bwd_) throw NumericalError("FFTW planning failed");
}

AngularFFT::~AngularFFT() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void AngularFFT::forward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void AngularFFT::backward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

std::shared_ptr<const AngularFFT> angular_fft(int rows, int Nt) {
  static std::mutex m;
  static std::map<std::pair<int, int>, std::shared_ptr<const AngularFFT>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[{rows, Nt}];
  if (!slot) slot = std::make_shared<const AngularFFT>(rows, Nt);
  return slot;
}

}  // namespace detail

std::string to_string(FieldKind k) {
  switch (k) {
    case FieldKind::Psi: return "psi";
    case FieldKind::U: return "u";
    case FieldKind::V: return "v";
  }
  return "unknown";
}

double PolarGrid::total_weight() const { return radial.area(); }

PolarGrid make_polar_grid(const RadialGrid& radial, int Nt) {
  if (Nt < 8 || Nt % 2 != 0) throw ParameterError("polar grid needs an even Nt >= 8");
  PolarGrid g;
  g.Nr = radial.n;
  g.Nt = Nt;
  g.radial = radial;
  g.dtheta = 2.0 * kPi / Nt;
  g.theta.resize(Nt);
  for (int j = 0; j < Nt; ++j) g.theta[j] = j * g.dtheta;
  return g;
}

PolarGrid make_disc_polar_grid(int Nr, int Nt, double r0) { return make_polar_grid(make_disc_grid(Nr, r0), Nt); }

PolarGrid sub_grid(const PolarGrid& g, int i0) {
  if (i0 < 0 || g.Nr - i0 < 8) throw ParameterError("sub_grid: too few rows");
  if (i0 == 0) return g;
  RadialGrid r = make_radial_grid(Domain::Annulus, g.radial.r[i0], g.Nr - i0);
  // keep the parent's node values so rows coincide exactly
  for (int i = 0; i < r.n; ++i) {
    r.s[i] = g.radial.s[i0 + i];
    r.r[i] = g.radial.r[i0 + i];
  }
  r.s0 = r.s[0];
  r.ds = g.radial.ds;
  for (int i = 0; i < r.n; ++i) r.w[i] = kPi * r.ds * ((i == 0 || i == r.n - 1) ? 0.5 : 1.0);
  for (int e = 0; e < r.n - 1; ++e) r.a[e] = g.radial.a[i0 + e];
  return make_polar_grid(r, g.Nt);
}

DiscField make_field(const PolarGrid& grid, FieldKind kind, const std::function<cplx(double, double)>& f) {
  DiscField out;
  out.grid = grid;
  out.kind = kind;
  out.values.resize(grid.size());
  for (int i = 0; i < grid.Nr; ++i)
    for (int j = 0; j < grid.Nt; ++j) out.values[grid.idx(i, j)] = f(grid.radial.r[i], grid.theta[j]);
  return out;
}

}  // namespace gpv
