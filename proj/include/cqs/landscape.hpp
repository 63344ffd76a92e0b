#pragma once

#include <string>
#include <vector>

#include "cqs/effective_hamiltonian.hpp"
#include "cqs/floquet.hpp"
#include "cqs/linalg.hpp"
#include "cqs/spin_algebra.hpp"

namespace cqs {

// Mean-field quasienergy per spin, E_G T, on the disc chart q^2 + p^2 <= 2.
double qel_kicked(double q, double p, double ht, double k);
double qel_ac(double q, double p, double ht, double gt, double omega_t);

class Landscape {
 public:
  static Landscape kicked(double ht, double k);
  static Landscape ac(double ht, double gt, double omega_t = kTwoPi);
  static Landscape from_drive(const DriveConfig& cfg);

  DriveKind model() const { return model_; }
  double ht() const { return ht_; }
  double k() const { return k_; }
  double gt() const { return gt_; }
  double omega_t() const { return omega_t_; }

  double energy(double q, double p) const;
  double energy_xyz(double x, double y, double z) const;
  // Chart centred on the south pole: the disc point (q, p) stands for (-X, -Y, Z).
  double reflected_energy(double q, double p) const;

 private:
  Landscape(DriveKind model, double ht, double k, double gt, double omega_t)
      : model_(model), ht_(ht), k_(k), gt_(gt), omega_t_(omega_t) {}
  DriveKind model_;
  double ht_, k_, gt_, omega_t_;
};

struct Derivatives {
  Eigen::Vector2d gradient;
  Eigen::Matrix2d hessian;
};

// Richardson-extrapolated central differences in (q, p).
Eigen::Vector2d landscape_gradient(const Landscape& land, double q, double p);
Derivatives gradient_and_hessian(const Landscape& land, double q, double p);
Derivatives reflected_gradient_and_hessian(const Landscape& land, double q, double p);

// det of the (alpha, alpha*) Hessian, from the (q, p) one.
inline double complex_hessian_det(const Eigen::Matrix2d& h) { return -h.determinant() / 4.0; }

// sqrt(|dE/dalpha|^2 + |dE/dalpha*|^2) = sqrt((E_q^2 + E_p^2) / 2)
double velocity(const Landscape& land, double q, double p);

// Weight of a critical point in the semiclassical density (f = 1 chart, M = 2j + 1).
double semiclassical_amplitude(double hessian_det, Index dim, int f = 1);

enum class CriticalKind { maximum, saddle, minimum };
const char* to_string(CriticalKind kind);

struct CriticalPoint {
  double q = 0.0, p = 0.0;
  double x = 1.0, y = 0.0, z = 0.0;
  CriticalKind kind = CriticalKind::saddle;
  double energy = 0.0;            // E_G T per spin
  double extensive_energy = 0.0;  // j E_G T
  double phase = 0.0;             // fold(j E_G T)
  int beta = 0;                   // +2 max, -2 min, 0 saddle
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  double det_mg = 0.0;            // |det H| / 4
  double amplitude = 0.0;
  bool on_boundary = false;
};

struct NewtonFailure {
  double seed_q = 0.0, seed_p = 0.0;
  double q = 0.0, p = 0.0;
  std::string reason;
};

struct CriticalPointOptions {
  int grid = 200;
  double merge_radius = 1e-6;
  double step_tolerance = 1e-12;
  double gradient_stop = 1e-11;
  double gradient_accept = 1e-9;
  int max_iterations = 50;
  double max_step = 0.1;
};

struct CriticalPointSet {
  std::vector<CriticalPoint> points;
  std::vector<NewtonFailure> failures;
  int count(CriticalKind kind) const;
};

CriticalPointSet find_critical_points(const Landscape& land, double j, const CriticalPointOptions& opts = {});

// Distinct saddle energies (within 1e-9); throws NoSaddle.
std::vector<double> separatrix_energies(const std::vector<CriticalPoint>& points);

struct Raster {
  int n = 0;
  double origin = 0.0;  // coordinate of index 0 along both axes
  double step = 0.0;
  std::vector<double> values;  // row-major [ip * n + iq]; NaN outside the disc

  double q(int i) const { return origin + step * i; }
  double p(int i) const { return origin + step * i; }
  double at(int iq, int ip) const { return values[static_cast<size_t>(ip) * n + iq]; }
};

Raster landscape_raster(const Landscape& land, int n);

}  // namespace cqs
