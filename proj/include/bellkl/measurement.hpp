#pragma once

#include <Eigen/Core>

#include "bellkl/fock.hpp"

namespace bellkl {

/// One party's polarization analysis, given as Bloch-sphere angles of the
/// single-photon state that exits at the *reflected* PBS port:
///   |r> = cos(polar/2)|H> + e^{i azimuth} sin(polar/2)|V>.
/// |H> sits on the +z axis and (|H>+|V>)/sqrt(2) on +x. Angles are degrees.
struct MeasurementSetting {
  double polar_deg = 0.0;
  double azimuth_deg = 0.0;
};

using SettingQuad = std::array<MeasurementSetting, 4>;  // A1, A2, B1, B2

/// True when polar is in [-180, 180] and azimuth in [0, 360).
bool setting_in_range(const MeasurementSetting& s);

/// Equivalent setting with polar wrapped to [-180, 180] and azimuth to [0, 360).
MeasurementSetting wrap_setting(const MeasurementSetting& s);

/// Amplitude map from the (H, V) mode pair to the (reflected, transmitted)
/// detector ports. The transmitted row is fixed to
///   |t> = -e^{-i azimuth} sin(polar/2)|H> + cos(polar/2)|V>
/// (determinant-one rotation); any other phase choice gives identical count
/// statistics.
Eigen::Matrix2cd port_rotation(const MeasurementSetting& s);

/// Re-expresses `state` in the detector-port mode basis
/// (A_refl, A_trans, B_refl, B_trans) given the two parties' settings.
/// This is the second-quantized action of the block rotation
/// diag(W_A, W_B) on the <=2-photon sector.
FockState rotate_to_ports(const FockState& state, const MeasurementSetting& alice,
                          const MeasurementSetting& bob);

}  // namespace bellkl
