#include "bellkl/fock.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bellkl {

namespace {
double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
}  // namespace

FockBasis::FockBasis() {
  for (int n0 = 0; n0 <= kMaxTotalPhotons; ++n0)
    for (int n1 = 0; n1 + n0 <= kMaxTotalPhotons; ++n1)
      for (int n2 = 0; n2 + n1 + n0 <= kMaxTotalPhotons; ++n2)
        for (int n3 = 0; n3 + n2 + n1 + n0 <= kMaxTotalPhotons; ++n3) {
          tuples_.push_back({n0, n1, n2, n3});
          totals_.push_back(n0 + n1 + n2 + n3);
        }
  raise_.resize(tuples_.size());
  for (std::size_t i = 0; i < tuples_.size(); ++i)
    for (int m = 0; m < kModeCount; ++m) {
      Occupation up = tuples_[i];
      up[m] += 1;
      raise_[i][m] = index_of(up);
    }
}

const FockBasis& FockBasis::instance() {
  static const FockBasis basis;
  return basis;
}

int FockBasis::index_of(const Occupation& occ) const {
  for (std::size_t i = 0; i < tuples_.size(); ++i)
    if (tuples_[i] == occ) return static_cast<int>(i);
  return -1;
}

int FockState::max_photons_alice() const {
  const auto& basis = FockBasis::instance();
  int best = 0;
  for (int i = 0; i < basis.size(); ++i)
    if (std::norm(amplitudes[i]) > 0.0) {
      const auto& t = basis.tuple(i);
      best = std::max(best, t[0] + t[1]);
    }
  return best;
}

int FockState::max_photons_bob() const {
  const auto& basis = FockBasis::instance();
  int best = 0;
  for (int i = 0; i < basis.size(); ++i)
    if (std::norm(amplitudes[i]) > 0.0) {
      const auto& t = basis.tuple(i);
      best = std::max(best, t[2] + t[3]);
    }
  return best;
}

FockState build_unbalanced_bell(double theta_deg) {
  if (!(theta_deg > 0.0 && theta_deg <= 45.0))
    throw std::domain_error("build_unbalanced_bell: theta must lie in (0, 45] degrees");
  const double th = deg2rad(theta_deg);
  const auto& basis = FockBasis::instance();
  FockState state;
  state.amplitudes[basis.index_of({1, 0, 1, 0})] = std::cos(th);
  state.amplitudes[basis.index_of({0, 1, 0, 1})] = std::sin(th);
  return state;
}

FockState build_pseudo_bell(double gamma_deg, double phi_deg) {
  if (!(gamma_deg > 0.0 && gamma_deg <= 45.0))
    throw std::domain_error("build_pseudo_bell: gamma must lie in (0, 45] degrees");
  if (!(phi_deg >= 0.0 && phi_deg < 360.0))
    throw std::domain_error("build_pseudo_bell: phi must lie in [0, 360) degrees");
  const double g = deg2rad(gamma_deg);
  const double phi = deg2rad(phi_deg);
  const std::complex<double> eip = std::polar(1.0, phi);
  const auto& basis = FockBasis::instance();
  FockState state;
  state.amplitudes[basis.index_of({1, 0, 1, 0})] = std::cos(g) * std::cos(g);
  state.amplitudes[basis.index_of({0, 1, 0, 1})] = std::sin(g) * std::sin(g) * eip * eip;
  state.amplitudes[basis.index_of({1, 1, 0, 0})] = std::cos(g) * std::sin(g) * eip;
  state.amplitudes[basis.index_of({0, 0, 1, 1})] = std::cos(g) * std::sin(g) * eip;
  return state;
}

FockState fock_basis_state(const Occupation& occ) {
  const int index = FockBasis::instance().index_of(occ);
  if (index < 0) throw std::domain_error("fock_basis_state: occupation outside the <=2-photon basis");
  FockState state;
  state.amplitudes[index] = 1.0;
  return state;
}

}  // namespace bellkl
