#include "bellkl/measurement.hpp"

#include <cmath>
#include <numbers>

namespace bellkl {

namespace {
double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
}  // namespace

bool setting_in_range(const MeasurementSetting& s) {
  return s.polar_deg >= -180.0 && s.polar_deg <= 180.0 && s.azimuth_deg >= 0.0 &&
         s.azimuth_deg < 360.0;
}

MeasurementSetting wrap_setting(const MeasurementSetting& s) {
  MeasurementSetting w = s;
  w.polar_deg = std::fmod(w.polar_deg, 360.0);
  if (w.polar_deg > 180.0) w.polar_deg -= 360.0;
  if (w.polar_deg < -180.0) w.polar_deg += 360.0;
  w.azimuth_deg = std::fmod(w.azimuth_deg, 360.0);
  if (w.azimuth_deg < 0.0) w.azimuth_deg += 360.0;
  return w;
}

Eigen::Matrix2cd port_rotation(const MeasurementSetting& s) {
  const double half = 0.5 * deg2rad(s.polar_deg);
  const double c = std::cos(half);
  const double sn = std::sin(half);
  const std::complex<double> eia = std::polar(1.0, deg2rad(s.azimuth_deg));
  Eigen::Matrix2cd w;
  // rows: (reflected, transmitted); columns: (H, V)
  w << c, sn * std::conj(eia),  //
      -sn * eia, c;
  return w;
}

FockState rotate_to_ports(const FockState& state, const MeasurementSetting& alice,
                          const MeasurementSetting& bob) {
  const auto& basis = FockBasis::instance();
  Eigen::Matrix4cd w4 = Eigen::Matrix4cd::Zero();
  w4.block<2, 2>(0, 0) = port_rotation(alice);
  w4.block<2, 2>(2, 2) = port_rotation(bob);

  const int dim = basis.size();
  FockState out;
  Eigen::VectorXcd work(dim), next(dim);
  for (int k = 0; k < dim; ++k) {
    const std::complex<double> amp = state.amplitudes[k];
    if (amp == 0.0) continue;
    const Occupation& occ = basis.tuple(k);
    double fact = 1.0;
    for (int m = 0; m < kModeCount; ++m)
      for (int r = 2; r <= occ[m]; ++r) fact *= r;
    // Expand amp * prod_i (a_i^dag)^{n_i} / sqrt(n!) |vac> with
    // a_i^dag -> sum_j W_{ji} b_j^dag, one creation operator at a time.
    work.setZero();
    work[basis.index_of({0, 0, 0, 0})] = amp / std::sqrt(fact);
    for (int mode = 0; mode < kModeCount; ++mode) {
      for (int rep = 0; rep < occ[mode]; ++rep) {
        next.setZero();
        for (int src = 0; src < dim; ++src) {
          const std::complex<double> c = work[src];
          if (c == 0.0) continue;
          for (int j = 0; j < kModeCount; ++j) {
            const std::complex<double> wj = w4(j, mode);
            if (wj == 0.0) continue;
            const int dst = basis.raised_index(src, j);
            next[dst] += c * wj * std::sqrt(double(basis.tuple(dst)[j]));
          }
        }
        work.swap(next);
      }
    }
    out.amplitudes += work;
  }
  return out;
}

}  // namespace bellkl
