#pragma once

#include <variant>
#include <vector>

#include "cqs/linalg.hpp"
#include "cqs/spin_algebra.hpp"

namespace cqs {

struct Kicked {
  double k = 0.3;
};
struct Monochromatic {
  double gt = 20.0;
};

// Dimensionless drive: time in units of the period, so every input is a product with T.
struct DriveConfig {
  std::variant<Kicked, Monochromatic> kind = Kicked{};
  double ht = 0.1;
  double omega_t = kTwoPi;

  bool is_kicked() const { return std::holds_alternative<Kicked>(kind); }
  double k() const { return std::get<Kicked>(kind).k; }
  double gt() const { return std::get<Monochromatic>(kind).gt; }
};

// Throws std::invalid_argument for omega_t <= 0; warns outside the regular kicked regime.
void validate_drive(const DriveConfig& cfg);

// Representative of x in [-omega/2, omega/2).
double fold(double x, double omega = kTwoPi);

// exp(-i hT Jx) exp(-i (K/2j) Jz^2)
CMatrix kicked_floquet(const SpinSystem& sys, const DriveConfig& cfg);

inline constexpr int kDefaultAcSteps = 4000;

// Time-ordered one-period propagator of hJx + g(t)Jz^2/2j, g = G cos(Omega t), second-order split.
CMatrix ac_floquet(const SpinSystem& sys, const DriveConfig& cfg, int steps = kDefaultAcSteps);

CMatrix floquet_operator(const SpinSystem& sys, const DriveConfig& cfg, int steps = kDefaultAcSteps);

struct FloquetSpectrum {
  RVector phases;      // ascending, in [-pi, pi)
  CMatrix modes;       // columns paired with phases
  RVector residuals;   // |F v - e^{-i phi} v|
};

FloquetSpectrum diagonalize_floquet(const CMatrix& f);

// T_n = sum_mu exp(-i n phi_mu), n = 1..n_max (element 0 holds T_1).
std::vector<cplx> floquet_traces(const RVector& phases, int n_max);
std::vector<cplx> floquet_traces(const CMatrix& f, int n_max);

// psi(lT) = F^l psi0 for l = 0..L.
std::vector<CVector> stroboscopic_evolve(const CMatrix& f, const CVector& psi0, int periods);

}  // namespace cqs
