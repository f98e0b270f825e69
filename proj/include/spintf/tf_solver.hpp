#pragma once

#include "spintf/model.hpp"

namespace spintf {

/// Critical Zeeman energy below which the ground state is the pure 2C state.
/// q1 = -n + sqrt(n^2 + alpha m^2). Requires alpha > 0.
double critical_q1(const ModelParams& p);

/// Critical Zeeman energy above which the ground state is the NS+MS mixture.
/// q2 = (1 - 1/sqrt(alpha+1)) (n + (sqrt(alpha+1)-1) m). Requires alpha > 0.
double critical_q2(const ModelParams& p);

/// Phase classification on reduced parameters (m >= 0). The boundaries
/// q = q1, q = q2 are assigned to the mixed NS_2C regime, which limits
/// continuously onto both of them.
Regime classify(const ModelParams& p);

TFSolution solve_ns_ms(const ModelParams& p);     // alpha > 0, q > q2
TFSolution solve_2c(const ModelParams& p);        // alpha > 0, q < q1
TFSolution solve_ns_2c(const ModelParams& p);     // alpha > 0, q1 <= q <= q2
TFSolution solve_ms_ms(const ModelParams& p);     // alpha in (-1,0), q < 0
TFSolution solve_3c(const ModelParams& p);        // alpha in (-1,0), q > 0
TFSolution solve_alpha_zero(const ModelParams& p);

/// Dispatch on classify(p); also covers the ferromagnetic q = 0 family.
TFSolution solve(const ModelParams& p);

/// E_TF = |Omega| [ r H_TF(a) + (1-r) H_TF(b) ].
double tf_energy(const TFSolution& sol, const ModelParams& p);

/// Real cubic c3 b^3 + c2 b^2 + c1 b + c0 on a bracket with a sign change
/// (or a root at an endpoint). Solved by bisection then one Newton polish.
struct CubicProblem {
  double c3 = 0, c2 = 0, c1 = 0, c0 = 0;
  double lo = 0, hi = 1;
  double tol = 1e-14;
};

double solve_cubic_bracketed(const CubicProblem& c);

}  // namespace spintf
