#include "rismp/coupling.hpp"

#include <cmath>

#include <gsl/gsl_sf_expint.h>

namespace rismp {

namespace {

constexpr Complex kJ{0.0, 1.0};

// Antiderivative building block: integral of e^{-jks}/s collapses to
// Ci - jSi after the standard u = R +- z substitution.
Complex g(double s) { return Complex(gsl_sf_Ci(s), -gsl_sf_Si(s)); }

struct Kernel {
  double k;
  double d;

  double s(double x) const { return k * (std::hypot(x, d) - x); }

  // int_p^q e^{-jkR(w)} e^{+jkw} dw / R,  R(w) = sqrt(w^2 + d^2)
  Complex plus(double p, double q) const { return g(s(p)) - g(s(q)); }
  // same with e^{-jkw}
  Complex minus(double p, double q) const { return plus(-q, -p); }

  // int_a^b e^{-jkR(z-c)} e^{sign jkz} dz / R
  Complex shifted(double a, double b, double c, int sign) const {
    const Complex phase = std::exp(kJ * (sign * k * c));
    return phase *
           (sign > 0 ? plus(a - c, b - c) : minus(a - c, b - c));
  }
};

}  // namespace

void ArrayGeometry::check() const {
  if (n_i < 1) {
    throw InvalidGeometry("ArrayGeometry: n_i must be >= 1");
  }
  if (spacing <= 0.0 || dipole_length <= 0.0 || frequency <= 0.0) {
    throw InvalidGeometry(
        "ArrayGeometry: spacing, dipole length, and frequency must be "
        "positive");
  }
}

Complex dipole_mutual_impedance(double length, double distance,
                                double wavelength) {
  if (length <= 0.0 || distance <= 0.0 || wavelength <= 0.0) {
    throw InvalidGeometry(
        "dipole_mutual_impedance: all arguments must be positive");
  }
  const double k = 2.0 * M_PI / wavelength;
  const double half = 0.5 * length;
  const double skl = std::sin(k * half);
  if (skl * skl < 1e-12) {
    throw InvalidGeometry(
        "dipole_mutual_impedance: full-wavelength-multiple dipole has a "
        "current null at the feed");
  }
  const Kernel ker{k, distance};

  // Current distribution sin(k(l/2 - |z|)) split into exponentials on
  // each half, against the three spherical-wave terms centered at the
  // driven dipole's feed and its two ends.
  const Complex e_pos = std::exp(kJ * (k * half));
  const Complex e_neg = std::exp(-kJ * (k * half));
  const double centers[3] = {half, -half, 0.0};
  const Complex weights[3] = {1.0, 1.0, -2.0 * std::cos(k * half)};

  Complex m = 0.0;
  for (int t = 0; t < 3; ++t) {
    const double c = centers[t];
    // z in [0, half]: sin(k(half - z))
    Complex part = e_pos * ker.shifted(0.0, half, c, -1) -
                   e_neg * ker.shifted(0.0, half, c, +1);
    // z in [-half, 0]: sin(k(half + z))
    part += e_pos * ker.shifted(-half, 0.0, c, +1) -
            e_neg * ker.shifted(-half, 0.0, c, -1);
    m += weights[t] * part;
  }
  m /= 2.0 * kJ;

  return kJ * kEta0 / (4.0 * M_PI * skl * skl) * m;
}

MatrixXcd ris_coupling_matrix(const ArrayGeometry& geom, double z0) {
  geom.check();
  const int n = geom.n_i;
  const double lambda = geom.wavelength();

  // Toeplitz by construction: the entry depends on |n - m| only.
  std::vector<Complex> by_offset(n);
  by_offset[0] = z0;
  for (int off = 1; off < n; ++off) {
    by_offset[off] = dipole_mutual_impedance(
        geom.dipole_length, off * geom.spacing, lambda);
  }

  MatrixXcd z(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      z(i, j) = by_offset[std::abs(i - j)];
    }
  }
  return z;
}

}  // namespace rismp
