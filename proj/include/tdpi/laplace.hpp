#ifndef TDPI_LAPLACE_HPP
#define TDPI_LAPLACE_HPP

#include "tdpi/charge.hpp"

namespace tdpi {

// h(p) = 2 pi i / (log p + 4 pi beta0); simple zero of the denominator at p_s.
cplx h_fn(cplx p, Side side = Side::principal);

// Laplace symbol of the interaction part of the survival amplitude,
// Z2_hat(p) = (i C/4pi) (log p - log(-lam) - i pi/2) / (p + i lam);
// the point p = -i lam = p_s is removable (two-term Taylor switch).
cplx z2_hat(cplx p, const SpectralConstants& sc, Side side = Side::principal);

// Laplace transform of the forcing, f_hat = -4 pi i Z2_hat(p) / log p.
// Genuine singularities: the branch point p = 0 and the simple pole at
// p = 1 where log p vanishes (the e^t growth of the forcing).
cplx f_hat(cplx p, const SpectralConstants& sc, Side side = Side::principal);

// Strip forcing g_hat_n(p) = -4 pi i Z2_hat(p + i omega n) / (log(p+i omega n) + 4 pi beta0).
cplx g_hat(cplx p, long n, const SpectralConstants& sc,
           const PhysicalParams& params, Side side = Side::principal);

// Truncated solution of the infinite tridiagonal strip system
//   qhat_n + alpha0 h(p + i omega n) [qhat_{n+1} - qhat_{n-1}] = ghat_n.
struct StripSolution {
    cplx p;
    long N = 0;                 // rows n = -N..N
    std::vector<cplx> qhat;     // index n + N
    bool converged = false;
    double doubling_diff = 0.0;

    cplx at(long n) const { return qhat[std::size_t(n + N)]; }
};

// Solves with zero Dirichlet closure and doubles N until the reported
// entries move by < 1e-8 (cap N = 2048).
StripSolution solve_strip(cplx p, long N, const PhysicalParams& params,
                          const SpectralConstants& sc, Side side = Side::principal,
                          bool refine = true);

// q_hat at an arbitrary point P, reduced into the strip (p = P - i omega n*).
cplx qhat_at(cplx P, const PhysicalParams& params, const SpectralConstants& sc,
             long N = 64, Side side = Side::principal);

// Boundary values across the branch cut: strip solve at p = -tau with the
// side flag applied to the row whose log argument lies on the cut.
StripSolution qhat_boundary(double tau, const PhysicalParams& params,
                            const SpectralConstants& sc, Side side, long N = 64);

// Truncated numeric Laplace transform of a uniformly sampled series with a
// certified tail bound (|series| <= M e^{1.5 t} assumed).
struct LaplaceValue {
    cplx value;
    double tail_bound;
};
LaplaceValue numeric_laplace(const std::vector<double>& times,
                             const std::vector<cplx>& values, cplx p);
LaplaceValue numeric_laplace(const ChargeGrid& cg, cplx p);

// Residual of the Laplace-domain functional equation with all q_hat values
// taken from the time-domain solution.
double functional_residual(cplx p, const ChargeGrid& cg,
                           const PhysicalParams& params, const SpectralConstants& sc);

// Near-origin representation qhat_0 = (H - 4 pi i Z2_hat) / (Q + log p)
// from the two auxiliary one-sided systems.
struct NearZeroRep {
    cplx Q;
    cplx H;
    cplx qhat0;        // representation value
    double q0_check;   // |qhat0_direct (Q + log p) - (H - 4 pi i Z2_hat)|
};
NearZeroRep near_zero_rep(cplx p, const PhysicalParams& params,
                          const SpectralConstants& sc, long N = 64);

} // namespace tdpi

#endif
