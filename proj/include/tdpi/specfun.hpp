#ifndef TDPI_SPECFUN_HPP
#define TDPI_SPECFUN_HPP

#include <complex>
#include <vector>

namespace tdpi {

using cplx = std::complex<double>;

// Euler-Mascheroni constant, 20 digits. Every formula in the library refers
// to this constant rather than recomputing it.
inline constexpr double euler_gamma = 0.57721566490153286061;

// Branch selection for logarithms evaluated on the negative real axis.
enum class Side { principal, above, below };

// Euler Gamma for x > 0.
double gamma_fn(double x);

// Volterra mu-function  mu(t,beta,delta) = int_0^inf t^{delta+s} s^beta /
// (Gamma(beta+1) Gamma(delta+s+1)) ds,  delta in {-1,0,1}, beta >= 0.
double volterra_mu(double t, double beta, double delta);

// nu(t) = mu(t,0,0), the antiderivative of the kernel I(t) = mu(t,0,-1).
// Computed through the Laplace branch-cut representation
//   nu(t) = e^t - 1 + int_R (1 - e^{-t e^u}) / (u^2 + pi^2) du,
// which separates the e^t growth from a bounded remainder nu_b.
double volterra_nu(double t);

// Bounded remainder nu_b(t) = nu(t) - (e^t - 1) and its antiderivative
// int_0^t nu_b.  These stay O(1) for all t and are what the charge solver
// tabulates; adding e^t - 1 back gives the full nu.
struct NuRemainder {
    double nu_b;
    double cum_nu_b;   // int_0^t nu_b(s) ds
};
NuRemainder volterra_nu_remainder(double t);

// Uniform tables of nu(j*step) and int_0^{j*step} nu. values[0] = 0,
// values strictly increasing, cumulative nondecreasing.
struct NuTable {
    double step = 0.0;
    std::vector<double> values;
    std::vector<double> cumulative;
    double t_max() const { return step * double(values.size() - 1); }
};
NuTable nu_table(double step, std::size_t count);

// Modified Bessel K0 for x > 0. Series below x = 2, scaled Chebyshev fits
// above; the seam is continuous to 1e-10.
double bessel_k0(double x);

// Shifted sine/cosine integrals: si(x) = Si(x) - pi/2,
// ci(x) = gamma + log x + int_0^x (cos s - 1)/s ds,  x > 0.
struct SiCi {
    double si;
    double ci;
};
SiCi sici(double x);

// Complex log with the cut on the negative real axis. On the cut the side
// flag picks Im = +pi (above) or -pi (below); off the cut it is ignored.
cplx clog(cplx p, Side side = Side::principal);

} // namespace tdpi

#endif
