#pragma once

#include "cqs/linalg.hpp"

namespace cqs {

// Li_f(exp(i theta)) for integer f >= 1, theta taken modulo 2 pi.
// f = 1 at theta = 0 returns (+inf, pi/2): the real part diverges logarithmically.
cplx li(int f, double theta);

// Partial sum of exp(i n theta) / n^f, n = 1..terms. Slow reference.
cplx li_series(int f, double theta, long long terms);

}  // namespace cqs
