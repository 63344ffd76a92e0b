#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqs/effective_hamiltonian.hpp"
#include "cqs/floquet.hpp"
#include "cqs/landscape.hpp"
#include "cqs/spin_algebra.hpp"

namespace cqs {

struct ModePoint {
  double energy = 0.0;  // <Phi|H_E T|Phi>
  double jx = 0.0;      // <Phi|Jx|Phi> / j
};

std::vector<ModePoint> mode_magnetization(const FloquetSpectrum& spec, const EffectiveHamiltonian& heff,
                                          const SpinSystem& sys);

struct Envelope {
  std::vector<double> energy;
  std::vector<double> jx;
  double spacing = 0.0;  // bin width in E_T
};

// Per-bin maximum of <Jx/j> over modes with <Jx/j> >= 0; empty bins are skipped.
Envelope upper_envelope(const std::vector<ModePoint>& modes, int bins);

struct Cusp {
  double energy = 0.0;
  double strength = 0.0;  // |slope change| / local spacing
};

// Interior slope sign change with the largest normalized second difference.
std::optional<Cusp> detect_cusp(const Envelope& env);

struct PathOptions {
  int raster = 400;
  double energy_tolerance = 1e-6;
};

// Minimal-velocity points on isocontours at n_points energies strictly between the endpoints.
// The contour is the level-set component around the endpoint that is an extremum.
std::vector<BlochPoint> minimal_velocity_path(const Landscape& land, const CriticalPoint& from,
                                              const CriticalPoint& to, int n_points,
                                              const PathOptions& opts = {});

// Streaming (1/(L+1)) sum_l <psi(lT)|O|psi(lT)>.
double time_averaged_observable(const CMatrix& f, const CVector& psi0, int periods, const CMatrix& op);

enum class Branch { min_to_saddle, saddle_to_max };
const char* to_string(Branch b);

struct ProtocolPath {
  Branch branch = Branch::saddle_to_max;
  std::vector<BlochPoint> points;
};

struct ProtocolRecord {
  BlochPoint r0;
  cplx gamma;
  double energy = 0.0;      // <psi0|H_E T|psi0>
  double jx_avg = 0.0;      // time-averaged <Jx/j>
  int periods = 0;
  Branch branch = Branch::saddle_to_max;
  double drift = 0.0;       // |E_T(0) - E_T(L)| under F
  double convergence_gap = 0.0;  // |avg(L) - avg(2L)|
  bool mirrored = false;
};

struct ProtocolFailure {
  Branch branch = Branch::saddle_to_max;
  size_t index = 0;
  std::string reason;
};

struct ProtocolResult {
  std::vector<ProtocolRecord> records;
  std::vector<ProtocolFailure> failures;
};

ProtocolResult run_protocol(const SpinSystem& sys, const CMatrix& f, const EffectiveHamiltonian& heff,
                            int periods, const std::vector<ProtocolPath>& paths, bool check_convergence = true);

// Lower branch through E -> -E, Jx -> -Jx.
std::vector<ProtocolRecord> mirror_records(const std::vector<ProtocolRecord>& records);

// <Jx/j> of the mode curve at the record's energy: on each side of E the mode, among the
// three nearest, whose <Jx/j> is closest to the record, then linear interpolation.
double mode_curve_value(const std::vector<ModePoint>& modes, double energy, double jx_hint);

}  // namespace cqs
