#ifndef RISMP_COUPLING_HPP
#define RISMP_COUPLING_HPP

#include "rismp/types.hpp"

namespace rismp {

inline constexpr double kSpeedOfLight = 299792458.0;
// Impedance of free space, ohms.
inline constexpr double kEta0 = 376.730313668;

/// Uniform linear array of parallel side-by-side thin dipoles.
struct ArrayGeometry {
  int n_i = 1;
  double spacing = 0.0;        // m
  double dipole_length = 0.0;  // m
  double frequency = 28e9;     // Hz

  double wavelength() const { return kSpeedOfLight / frequency; }
  void check() const;
};

/// Mutual impedance of two parallel side-by-side thin dipoles with
/// sinusoidal current distribution (induced-EMF method), evaluated in
/// closed form through cosine/sine integrals.
Complex dipole_mutual_impedance(double length, double distance,
                                double wavelength);

/// Z_II for the array: diagonal forced to z0 (perfectly matched
/// elements), off-diagonal entries from the dipole model at |n-m|*d.
MatrixXcd ris_coupling_matrix(const ArrayGeometry& geom,
                              double z0 = kDefaultZ0);

}  // namespace rismp

#endif  // RISMP_COUPLING_HPP
