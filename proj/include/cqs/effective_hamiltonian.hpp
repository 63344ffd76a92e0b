#pragma once

#include <string>
#include <vector>

#include "cqs/floquet.hpp"
#include "cqs/linalg.hpp"
#include "cqs/spin_algebra.hpp"

namespace cqs {

enum class DriveKind { kicked, monochromatic };

struct ValidityReport {
  // Kicked: smallest distance of (K/2j)(2m+1) to 2*pi*l, l != 0. Infinity for ac.
  double singular_distance = 0.0;
  std::vector<std::string> warnings;
};

// H_E T, dimensionless.
struct EffectiveHamiltonian {
  CMatrix matrix;
  DriveKind model = DriveKind::kicked;
  ValidityReport validity;
};

struct EffectiveOptions {
  // Regular-regime guard for the kicked closed form.
  double max_ht = 0.5;
  double max_k = 0.5;
  // The ac high-frequency form warns above this fraction of Omega T.
  double ac_ht_fraction = 0.2;
};

// -i x / (exp(-i x) - 1), continued by 1 at x = 0.
cplx kicked_diagonal(double x);

EffectiveHamiltonian kicked_effective_hamiltonian(const SpinSystem& sys, const DriveConfig& cfg,
                                                  const EffectiveOptions& opts = {});
EffectiveHamiltonian ac_effective_hamiltonian(const SpinSystem& sys, const DriveConfig& cfg,
                                              const EffectiveOptions& opts = {});
EffectiveHamiltonian effective_hamiltonian(const SpinSystem& sys, const DriveConfig& cfg,
                                           const EffectiveOptions& opts = {});

struct UnfoldedSpectrum {
  RVector energies;  // E_mu T ascending
  CMatrix vectors;
};

UnfoldedSpectrum unfolded_spectrum(const EffectiveHamiltonian& h);

struct PhaseMatch {
  std::vector<Index> partner;  // exact-phase index for each unfolded level
  RVector distance;            // circular distance of each pair
  double max_distance = 0.0;
};

// Greedy pairing in order of the unfolded levels: each takes the nearest unused exact phase.
PhaseMatch match_phases(const RVector& unfolded, const RVector& exact_phases, double omega = kTwoPi);

}  // namespace cqs
