#ifndef TDPI_MODEL_HPP
#define TDPI_MODEL_HPP

#include "tdpi/specfun.hpp"

#include <functional>

namespace tdpi {

// Model inputs: monochromatic coupling alpha(t) = alpha0 sin(omega t) and
// the regularization parameter lambda (fixed to 1 throughout the library).
struct PhysicalParams {
    double alpha0 = 0.0;
    double omega = 1.0;
    double lambda_ref = 1.0;
};

// Constants derived from the frozen (t = 0) Hamiltonian.
struct SpectralConstants {
    double lambda_alpha;    // sole eigenvalue, negative
    double c_alpha;         // L2 normalization, c_alpha^2 = -4 pi lambda_alpha
    cplx p_s;               // zero of log p + 4 pi beta0 (= -i lambda_alpha)
    double theta_1;         // (log(1/2) + gamma) / (2 pi)
    cplx beta0;             // gamma/(2pi) - log2/(2pi) - i/8
    cplx beta_plus;         // +i alpha0 / 2
    cplx beta_minus;        // -i alpha0 / 2

    double abs_lambda() const { return -lambda_alpha; }
    cplx four_pi_beta0() const { return 4.0 * M_PI * beta0; }
};

// Constants for a given alpha(0); beta_{+-1} are left zero here.
SpectralConstants spectral_constants(double alpha_at_zero);

// Monochromatic convenience: alpha(0) = 0 and beta_{+-1} = +-i alpha0/2.
SpectralConstants spectral_constants(const PhysicalParams& params);

// zeta(t) = 4 pi (alpha(t) + theta_1 - i/8), the multiplier of the charge
// under the convolution kernel.
cplx zeta(double t, const PhysicalParams& params);
cplx zeta_of_alpha(double alpha_value);

// Free evolution of the bound state evaluated at the origin,
// (U(s) phi_alpha)(0) = -(C/4pi) e^{-i lam s} (ci(-lam s) - i si(-lam s)).
cplx free_at_origin(double s, const SpectralConstants& sc);

// Bounded remainder r(s) = 4 pi (U(s) phi_alpha)(0) - C(-gamma - log s).
// r(0) = C(-log(-lambda) - i pi/2); r grows only logarithmically.
cplx forcing_remainder(double s, const SpectralConstants& sc);

// Forcing f(t_j) = C + (I * r)(t_j) on the uniform grid of the table,
// by product integration of the bounded remainder.
std::vector<cplx> forcing_f(const std::vector<double>& times,
                            const SpectralConstants& sc, const NuTable& nu);

// Location of the strip singularity and the no-resonance check.
struct ResonanceInfo {
    long nbar;        // unique natural with E/omega - 1 < nbar <= E/omega
    cplx pbar;        // i (E - omega nbar), the in-strip singular point
    bool resonant;    // N omega = e^{2(log2-gamma)} for some natural N
    double margin;    // |pbar|
};
ResonanceInfo resonance_info(const PhysicalParams& params);

} // namespace tdpi

#endif
