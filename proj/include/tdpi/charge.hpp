#ifndef TDPI_CHARGE_HPP
#define TDPI_CHARGE_HPP

#include "tdpi/model.hpp"

#include <functional>
#include <vector>

namespace tdpi {

// Exact moments of the kernel I over the panels of a uniform grid:
//   w0[m] = nu((m+1)h) - nu(mh)           (zeroth moment)
//   w1[m] = int_{mh}^{(m+1)h} s I(s) ds   (first moment, via the cumulative)
struct KernelWeights {
    double step = 0.0;
    std::vector<double> w0;
    std::vector<double> w1;
};
KernelWeights kernel_weights(double h, std::size_t n, const NuTable& nu);

// Charge trajectory on a uniform grid.
struct ChargeGrid {
    PhysicalParams params;
    SpectralConstants sc;
    double step = 0.0;
    std::vector<cplx> q;

    double time(std::size_t j) const { return step * double(j); }
    double t_max() const { return step * double(q.size() - 1); }
    std::vector<double> times() const {
        std::vector<double> t(q.size());
        for (std::size_t j = 0; j < t.size(); ++j) t[j] = time(j);
        return t;
    }
};

// Optional hooks for a non-monochromatic coupling or a different initial
// datum. The datum enters through its charge at t = 0 and the bounded
// forcing remainder r with f = q0 + I * r.
struct ChargeOptions {
    std::function<double(double)> alpha_fn;            // default: alpha0 sin(omega t)
    std::function<cplx(double)> forcing_remainder_fn;  // default: bound-state datum
    cplx q0 = 0.0;                                     // used with a custom remainder
    std::size_t startup_panels = 8;                    // coarse panels refined at start
    std::size_t startup_refine = 16;                   // subdivision factor
};

// Marching product-integration solver for the charge equation on [0, T].
ChargeGrid solve_charge(const PhysicalParams& params, const SpectralConstants& sc,
                        double T, double h, const ChargeOptions& opts = {});

// Picard iteration q <- f - I(zeta q); valid on the contraction window
// zeta_T * nu(T) < 1 only.
ChargeGrid solve_picard(const PhysicalParams& params, const SpectralConstants& sc,
                        double T, double h, std::size_t iterations);

} // namespace tdpi

#endif
