#ifndef TDPI_OBSERVABLES_HPP
#define TDPI_OBSERVABLES_HPP

#include "tdpi/charge.hpp"

namespace tdpi {

// Survival amplitude split Theta(t) = Z1(t) + Z(t).
struct SurvivalSeries {
    std::vector<double> times;
    std::vector<cplx> z1;
    std::vector<cplx> z;
    std::vector<cplx> theta;
};

// Free-evolution overlap Z1(t) = <phi_alpha, U(t) phi_alpha>
//  = 1 - i|lam| t e^{i|lam| t} E1(i|lam| t), E1 expressed through si/ci.
cplx z1(double t, const SpectralConstants& sc);

// Interaction part Z(t) = i int_0^t q(tau) (U(t-tau) phi_alpha)(0) dtau,
// product integration with exact log-moments near tau = t.
// Evaluation times are the subset {j*stride*h} of the charge grid.
std::vector<cplx> z_interaction(const std::vector<double>& t_eval,
                                const ChargeGrid& cg, const SpectralConstants& sc);

SurvivalSeries survival_series(const ChargeGrid& cg, std::size_t stride = 1);

// L2 norm of psi(t) computed radially in Fourier space; k-integral truncated
// at k_max (nk quadrature nodes) with the analytic O(k^-4) tail added.
double mass(double t, const ChargeGrid& cg, const SpectralConstants& sc,
            double k_max = 30.0, std::size_t nk = 0);

// Envelope power-law fit of |Theta| over a window.
struct DecayFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    double t_min = 0.0, t_max = 0.0;
    double residual = 0.0;   // RMS in log-log coordinates
};
DecayFit decay_fit(const SurvivalSeries& series, double t_min, double t_max);

} // namespace tdpi

#endif
