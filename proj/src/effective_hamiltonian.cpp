#include "cqs/effective_hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cqs/diagnostics.hpp"
#include "cqs/errors.hpp"

namespace cqs {

namespace {

double distance_to_singular_set(double x) {
  const double l = std::round(x / kTwoPi);
  if (l != 0.0) return std::abs(x - kTwoPi * l);
  return std::min(std::abs(x - kTwoPi), std::abs(x + kTwoPi));
}

// J+ D + h.c. with D diagonal
CMatrix symmetrized_ladder(const SpinSystem& sys, const CVector& d) {
  const CMatrix a = sys.jplus * d.asDiagonal();
  return a + a.adjoint();
}

}  // namespace

cplx kicked_diagonal(double x) {
  if (std::abs(x) < 1e-4) return {1.0 - x * x / 12.0, x / 2.0};
  if (std::abs(fold(x)) < 1e-6) {
    std::ostringstream os;
    os << "kicked effective Hamiltonian: argument " << x << " lies on the singular set 2*pi*l";
    throw SingularArgument(os.str());
  }
  const cplx ix(0.0, x);
  return -ix / (std::exp(-ix) - 1.0);
}

EffectiveHamiltonian kicked_effective_hamiltonian(const SpinSystem& sys, const DriveConfig& cfg,
                                                  const EffectiveOptions& opts) {
  if (!cfg.is_kicked()) throw std::invalid_argument("kicked_effective_hamiltonian: drive is not kicked");
  validate_drive(cfg);
  const double k = cfg.k();
  if (std::abs(cfg.ht) > opts.max_ht || std::abs(k) > opts.max_k) {
    std::ostringstream os;
    os << "kicked effective Hamiltonian outside the regular regime: hT=" << cfg.ht << ", K=" << k
       << " (limits " << opts.max_ht << ", " << opts.max_k << ")";
    throw ValidityError(os.str());
  }
  EffectiveHamiltonian h;
  h.model = DriveKind::kicked;
  h.validity.singular_distance = std::numeric_limits<double>::infinity();
  CVector d(sys.dim);
  for (Index i = 0; i < sys.dim; ++i) {
    const double x = k / (2.0 * sys.j) * (2.0 * sys.m(i) + 1.0);
    h.validity.singular_distance = std::min(h.validity.singular_distance, distance_to_singular_set(x));
    d(i) = kicked_diagonal(x);
  }
  const RVector m2 = sys.m.array().square();
  h.matrix = (k / (2.0 * sys.j) * m2).cast<cplx>().asDiagonal();
  h.matrix += 0.5 * cfg.ht * symmetrized_ladder(sys, d);
  return h;
}

EffectiveHamiltonian ac_effective_hamiltonian(const SpinSystem& sys, const DriveConfig& cfg,
                                              const EffectiveOptions& opts) {
  if (cfg.is_kicked()) throw std::invalid_argument("ac_effective_hamiltonian: drive is not monochromatic");
  validate_drive(cfg);
  EffectiveHamiltonian h;
  h.model = DriveKind::monochromatic;
  h.validity.singular_distance = std::numeric_limits<double>::infinity();
  if (std::abs(cfg.ht) > opts.ac_ht_fraction * cfg.omega_t) {
    std::ostringstream os;
    os << "ac effective Hamiltonian: hT=" << cfg.ht << " is not small against Omega T=" << cfg.omega_t;
    h.validity.warnings.push_back(os.str());
    warn(os.str());
  }
  const double scale = cfg.gt() / (2.0 * sys.j * cfg.omega_t);
  CVector b(sys.dim);
  for (Index i = 0; i < sys.dim; ++i) b(i) = std::cyl_bessel_j(0.0, std::abs(scale * (2.0 * sys.m(i) + 1.0)));
  h.matrix = 0.5 * cfg.ht * symmetrized_ladder(sys, b);
  return h;
}

EffectiveHamiltonian effective_hamiltonian(const SpinSystem& sys, const DriveConfig& cfg,
                                           const EffectiveOptions& opts) {
  return cfg.is_kicked() ? kicked_effective_hamiltonian(sys, cfg, opts)
                         : ac_effective_hamiltonian(sys, cfg, opts);
}

UnfoldedSpectrum unfolded_spectrum(const EffectiveHamiltonian& h) {
  if (hermiticity_defect(h.matrix) > 1e-10)
    throw std::invalid_argument("unfolded_spectrum: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix);
  if (es.info() != Eigen::Success) throw NumericalError("unfolded_spectrum: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

PhaseMatch match_phases(const RVector& unfolded, const RVector& exact_phases, double omega) {
  if (unfolded.size() > exact_phases.size())
    throw std::invalid_argument("match_phases: more unfolded levels than exact phases");
  PhaseMatch out;
  out.partner.assign(static_cast<size_t>(unfolded.size()), -1);
  out.distance.resize(unfolded.size());
  std::vector<bool> used(static_cast<size_t>(exact_phases.size()), false);
  for (Index i = 0; i < unfolded.size(); ++i) {
    const double phi = fold(unfolded(i), omega);
    Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < exact_phases.size(); ++k) {
      if (used[static_cast<size_t>(k)]) continue;
      const double d = std::abs(fold(exact_phases(k) - phi, omega));
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[static_cast<size_t>(best)] = true;
    out.partner[static_cast<size_t>(i)] = best;
    out.distance(i) = best_d;
    out.max_distance = std::max(out.max_distance, best_d);
  }
  return out;
}

}  // namespace cqs
