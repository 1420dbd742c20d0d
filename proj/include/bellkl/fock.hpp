#pragma once

#include <array>
#include <complex>
#include <vector>
#include <Eigen/Core>

// Two-party photonic Fock space over the four polarization modes
// (A_H, A_V, B_H, B_V), restricted to at most two photons in total.

namespace bellkl {

inline constexpr int kModeCount = 4;
inline constexpr int kMaxTotalPhotons = 2;

using Occupation = std::array<int, kModeCount>;

/// Enumeration of all occupation tuples with total photon number <= 2,
/// in lexicographic order. The enumeration is fixed so that amplitude
/// vectors and transfer matrices share a stable index convention.
class FockBasis {
 public:
  static const FockBasis& instance();

  int size() const { return static_cast<int>(tuples_.size()); }
  const Occupation& tuple(int index) const { return tuples_[index]; }
  int total_photons(int index) const { return totals_[index]; }

  /// Index of an occupation tuple, or -1 if it is not in the basis.
  int index_of(const Occupation& occ) const;

  /// Index of tuple(index) with one photon added in `mode`,
  /// or -1 if that would exceed the photon cap.
  int raised_index(int index, int mode) const { return raise_[index][mode]; }

 private:
  FockBasis();
  std::vector<Occupation> tuples_;
  std::vector<int> totals_;
  std::vector<std::array<int, kModeCount>> raise_;
};

/// Pure state on the <=2-photon sector, stored as a complex amplitude
/// per FockBasis tuple.
struct FockState {
  Eigen::VectorXcd amplitudes;

  FockState() : amplitudes(Eigen::VectorXcd::Zero(FockBasis::instance().size())) {}

  double norm() const { return amplitudes.norm(); }
  bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }

  /// Largest photon number that can arrive at Alice (modes A_H + A_V)
  /// over the support of the state. Per-party photon number is conserved
  /// by local polarization rotations, so this bounds Alice's counts.
  int max_photons_alice() const;
  int max_photons_bob() const;
};

/// cos(theta)|1,0,1,0> + sin(theta)|0,1,0,1>, theta in degrees, (0, 45].
FockState build_unbalanced_bell(double theta_deg);

/// Two independent photons, each polarized at angle gamma (phase phi on the
/// V component), combined on a polarizing beam splitter:
///   cos^2(g)|1,0,1,0> + sin^2(g) e^{2 i phi}|0,1,0,1>
///   + cos(g) sin(g) e^{i phi} (|1,1,0,0> + |0,0,1,1>).
/// gamma in degrees (0, 45], phi in degrees [0, 360).
FockState build_pseudo_bell(double gamma_deg, double phi_deg);

/// Basis state |occ>, e.g. {1,0,1,0} for one H photon on each side.
FockState fock_basis_state(const Occupation& occ);

}  // namespace bellkl
