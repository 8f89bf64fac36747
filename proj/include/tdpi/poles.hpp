#ifndef TDPI_POLES_HPP
#define TDPI_POLES_HPP

#include "tdpi/laplace.hpp"

#include <map>

namespace tdpi {

// Upward/downward continued fractions solving the ratio fixed-point
// equations rho = a h/(1 + a h rho(.+i omega)),
// Omega = -a h(.-i omega)/(1 - a h(.-i omega) Omega(.-i omega)).
// Depth doubles until the value moves < 1e-12 (cap 512).
cplx rho_cf(cplx p, const PhysicalParams& params, std::size_t depth = 16);
cplx omega_cf(cplx p, const PhysicalParams& params, std::size_t depth = 16);

// Closed-form seed pbar + alpha0^2 (z0 + alpha0^2 z1 + alpha0^4 z2) for the
// ionization pole; the coefficients come from the alpha0^2-expansion of the
// matching condition 1/(alpha0 h(p)) = Omega(p) - rho(p + i omega).
cplx pole_seed(const PhysicalParams& params, const SpectralConstants& sc);

struct PoleResult {
    bool found = false;
    cplx p0;
    cplx seed;
    int winding = 0;
    cplx cf_root;
    cplx det_root;
    double agree = 0.0;         // |cf_root - det_root|
    bool cf_converged = false;  // continued fractions leave their contraction
                                // regime for large |alpha0|
};

// Normalized determinant of the truncated strip system (mantissa, exp2)
// by the three-term recurrence.
struct ScaledDet {
    cplx mantissa;
    double log_scale;
};
ScaledDet strip_determinant(cplx p, long N, const PhysicalParams& params,
                            const SpectralConstants& sc, Side side = Side::principal);

// Two independent root finders (continued-fraction matching and determinant
// Newton) started from the seed, plus a winding certification around the root.
PoleResult find_pole(const PhysicalParams& params, const SpectralConstants& sc,
                     long N = 128);

// Argument-principle count of determinant zeros inside the rectangle
// [re_min, re_max] x [im_min, im_max], traversed counterclockwise.
struct Rectangle {
    double re_min, re_max, im_min, im_max;
};
int winding_count(const PhysicalParams& params, const SpectralConstants& sc,
                  const Rectangle& rect, std::size_t M = 400, long N = 128);

// Residues R_n of qhat_n at the pole, by trapezoid contour integration.
struct ResidueSet {
    cplx p0;
    std::map<long, cplx> R;
    double recursion_residual = 0.0;  // max_n |R_n + a h(p0+i omega n)(R_{n+1}-R_{n-1})|
    double decay_constant = 0.0;      // sup |n R_n|
};
ResidueSet residues(const PoleResult& pr, const PhysicalParams& params,
                    const SpectralConstants& sc, long N = 64,
                    double radius = 0.0, std::size_t M = 128);

// Spectral reconstruction of Z(t) as pole sum plus branch-cut integrals.
struct ReconstructedZ {
    cplx z;
    cplx pole_sum;     // 2 pi i sum Z2(p_n) R_n e^{p_n t}
    cplx branch_sum;   // sum_n e^{i omega n t} int e^{-tau t} [Z2+ q+ - Z2- q-]
    double last_ring_fraction = 0.0;
};
ReconstructedZ reconstruct_Z(double t, const PoleResult& pr, const ResidueSet& rs,
                             const PhysicalParams& params, const SpectralConstants& sc,
                             long n_cut, const std::vector<double>& tau_grid,
                             long N = 64);

// Geometrically graded tau grid for the branch integrals, refined near the
// branch points where qhat varies on a 1/log scale.
std::vector<double> default_tau_grid(double t, double tau_min = 1e-7,
                                     std::size_t per_decade = 24);

// Precomputed branch-cut jump data, reusable across evaluation times:
// jump[k][n + n_cut] = [Z2+ qhat+ - Z2- qhat-](-tau_k + i omega n).
struct BranchTable {
    std::vector<double> tau;
    std::vector<std::vector<cplx>> jump;
    long n_cut = 0;
};
BranchTable make_branch_table(const PhysicalParams& params, const SpectralConstants& sc,
                              long n_cut, const std::vector<double>& tau_grid, long N = 64);

ReconstructedZ reconstruct_Z(double t, const PoleResult& pr, const ResidueSet& rs,
                             const PhysicalParams& params, const SpectralConstants& sc,
                             const BranchTable& table);

} // namespace tdpi

#endif
