#pragma once
// Frozen reference values computed independently of this library
// (50-digit arithmetic on closed-form metric components; embedding
// formulas for the curved-space distances). Used across the test suite.

namespace oracle {

// --- closed-form constants -------------------------------------------------
inline constexpr double kSqrt3 = 1.7320508075688773;          // sqrt(3)
inline constexpr double kTwoSqrt019 = 0.87177978870813471;    // 2*sqrt(0.19)
inline constexpr double kTenMinusSqrt9975 = 0.012507822280910542;
inline constexpr double kMinusTwoSqrt2 = -2.8284271247461901; // -2*sqrt(2)
inline constexpr double kInvSqrt375 = 0.51639777949432225;    // 1/sqrt(3.75)

// --- de Sitter 2D:  g = dt^2 - cosh^2(t) dth^2 ------------------------------
// Christoffels at any t:  Gam^t_thth = cosh t sinh t,  Gam^th_t,th = tanh t.
// Ricci is -g (pointwise): R_tt = -1, R_thth = +cosh^2 t, off-diagonal 0.
// Strong energy condition FAILS: Ric(v,v) = -g(v,v) < 0 for timelike v.

// Time separations via the hyperboloid embedding, ell = arccosh(-<X,Y>):
//   X(t,th) = (sinh t, cosh t cos th, cosh t sin th), ambient signature (+,-,-).
inline constexpr double kDsEll_00_to_10 = 1.0;                        // (0,0)->(1,0)
inline constexpr double kDsEll_00_to_12_05 = 1.0381105327733962;      // (0,0)->(1.2,0.5)
inline constexpr double kDsEll_m04_01_to_09_06 = 1.1802918177890289;  // (-0.4,0.1)->(0.9,0.6)
inline constexpr double kDsEll_00_to_20_13 = 0.11292618504317684;     // (0,0)->(2.0,1.3)
// (0,0)->(1.0,1.2) is NOT causally connectable: horizon angle at t=1 is
inline constexpr double kDsHorizonTheta_r1 = 0.86576948324;
inline constexpr double kDsHorizonTheta_r2 = 1.30176033605;
inline constexpr double kDsHorizonTheta_r284 = 1.45407768283;

// Nonlinear-Bochner identity on dS2 with u = t + sin(th)/20, p = 1/2,
// evaluated at (t,th) = (0.3, 0.2).  Both sides agree to 2e-15:
inline constexpr double kDsBochnerBothSides = -0.9109343102700143;
inline constexpr double kDsBochnerHessTerm = 0.09016627520092187;   // H^ij u_jk H^kl u_li
inline constexpr double kDsBochnerRicciTerm = -1.001100585470938;   // Ric(H., H.)
// With the pure field u = t the value collapses to -sech^2(t):
inline constexpr double kDsBochnerPureU = -0.9151369618266292;      // -sech^2(0.3)
inline constexpr double kSech2_03 = 0.9151369618266292;
inline constexpr double kTanh2_03 = 0.084863038173370797;

// --- R x S^2(rho=2):  g = dt^2 - rho^2(dth^2 + sin^2 th dph^2) ---------------
// Ricci: R_tt = 0, R_thth = 1 (= -g_thth / rho^2), R_phph = sin^2 th.
// Strong energy condition holds: Ric(v,v) >= 0 for all timelike v.

// --- Minkowski Busemann extrapolation model ---------------------------------
// b_r(x) = r - sqrt((r-t)^2 - d^2) fitted as b + c/r over the last three of
// r in {12.2, 24.4, 48.9, 97.8}:
//   (t,d) = ( 1.0, 0.5): fit error -6.96e-5
//   (t,d) = (-1.0, 0.4): fit error +3.96e-5
//   (t,d) = ( 0.37,0.21): fit error -4.4e-6
// so the extrapolated-limit checks use tolerance 1e-4 on |t|<=1, d<=0.5.

}  // namespace oracle
