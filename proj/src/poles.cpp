#include "tdpi/poles.hpp"
#include "tdpi/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tdpi {

namespace {

cplx rho_depth(cplx p, double alpha0, double omega, std::size_t K) {
    cplx x = alpha0 * h_fn(p + cplx(0.0, omega * double(K)));
    for (std::size_t k = K; k-- > 0;) {
        const cplx ah = alpha0 * h_fn(p + cplx(0.0, omega * double(k)));
        x = ah / (1.0 + ah * x);
    }
    return x;
}

cplx omega_depth(cplx p, double alpha0, double omega, std::size_t K) {
    cplx x = -alpha0 * h_fn(p - cplx(0.0, omega * double(K + 1)));
    for (std::size_t k = K; k-- > 0;) {
        const cplx ah = alpha0 * h_fn(p - cplx(0.0, omega * double(k + 1)));
        x = -ah / (1.0 - ah * x);
    }
    return x;
}

template <typename F>
cplx converge_depth(F eval, std::size_t depth, const char* what) {
    depth = std::max<std::size_t>(depth, 4);
    cplx cur = eval(depth);
    for (;;) {
        const std::size_t d2 = 2 * depth;
        const cplx nxt = eval(d2);
        const double diff = std::abs(nxt - cur);
        if (diff < 1e-12) return nxt;
        if (d2 >= 512)
            throw ConvergenceError(std::string(what) + ": continued fraction did not settle",
                                   diff);
        depth = d2;
        cur = nxt;
    }
}

cplx h_deriv(cplx P) {
    const cplx hh = h_fn(P);
    return -hh * hh / (cplx(0.0, 2.0 * M_PI) * P);
}

cplx h_deriv2(cplx P) {
    const cplx L = clog(P) + cplx(2.0 * euler_gamma - 2.0 * std::log(2.0), -M_PI_2);
    return cplx(0.0, 2.0 * M_PI) * (2.0 / (L * L * L * P * P) + 1.0 / (L * L * P * P));
}

} // namespace

cplx rho_cf(cplx p, const PhysicalParams& params, std::size_t depth) {
    return converge_depth(
        [&](std::size_t K) { return rho_depth(p, params.alpha0, params.omega, K); },
        depth, "rho_cf");
}

cplx omega_cf(cplx p, const PhysicalParams& params, std::size_t depth) {
    return converge_depth(
        [&](std::size_t K) { return omega_depth(p, params.alpha0, params.omega, K); },
        depth, "omega_cf");
}

cplx pole_seed(const PhysicalParams& params, const SpectralConstants& sc) {
    const ResonanceInfo res = resonance_info(params);
    if (res.resonant)
        throw ResonanceError("pole_seed: resonant frequency", res.nbar);
    const double E = std::exp(2.0 * (std::log(2.0) - euler_gamma));
    if (std::abs(params.omega - E) < 1e-12)
        throw DomainError("pole_seed: omega at the boundary e^{2(log2-gamma)}");

    const cplx ps = sc.p_s;
    const cplx io(0.0, params.omega);
    const cplx H1 = h_fn(ps + io), Hm1 = h_fn(ps - io);
    const cplx H2 = h_fn(ps + 2.0 * io), Hm2 = h_fn(ps - 2.0 * io);
    const cplx H3 = h_fn(ps + 3.0 * io), Hm3 = h_fn(ps - 3.0 * io);
    const cplx D1 = h_deriv(ps + io), Dm1 = h_deriv(ps - io);
    const cplx D2 = h_deriv(ps + 2.0 * io), Dm2 = h_deriv(ps - 2.0 * io);
    const cplx Q1 = h_deriv2(ps + io), Qm1 = h_deriv2(ps - io);
    const cplx tp(0.0, 2.0 * M_PI);

    const cplx z0 = -tp * ps * (H1 + Hm1);
    const cplx z1 = z0 * z0 / (2.0 * ps) - tp * ps * z0 * (D1 + Dm1)
                  + tp * ps * (H1 * H1 * H2 + Hm1 * Hm1 * Hm2);
    const cplx z2 = z0 * z1 / ps - z0 * z0 * z0 / (3.0 * ps * ps)
                  - tp * ps * (z1 * (D1 + Dm1) + 0.5 * z0 * z0 * (Q1 + Qm1)
                  - z0 * (2.0 * H1 * D1 * H2 + H1 * H1 * D2
                          + 2.0 * Hm1 * Dm1 * Hm2 + Hm1 * Hm1 * Dm2)
                  + H1 * H1 * H2 * H2 * H3 + H1 * H1 * H1 * H2 * H2
                  + Hm1 * Hm1 * Hm2 * Hm2 * Hm3 + Hm1 * Hm1 * Hm1 * Hm2 * Hm2);

    const double a2 = params.alpha0 * params.alpha0;
    return res.pbar + a2 * (z0 + a2 * (z1 + a2 * z2));
}

ScaledDet strip_determinant(cplx p, long N, const PhysicalParams& params,
                            const SpectralConstants& sc, Side side) {
    (void)sc;
    cplx a_prev = params.alpha0 * h_fn(p + cplx(0.0, -params.omega * double(N)), side);
    cplx Dm2 = 1.0, Dm1 = 1.0;
    double logs = 0.0;
    for (long n = -N + 1; n <= N; ++n) {
        const cplx a = params.alpha0 * h_fn(p + cplx(0.0, params.omega * double(n)), side);
        cplx D = Dm1 + a * a_prev * Dm2;
        const double m = std::abs(D);
        if (m > 1e100 || (m > 0.0 && m < 1e-100)) {
            D /= m;
            Dm1 /= m;
            logs += std::log(m);
        }
        Dm2 = Dm1;
        Dm1 = D;
        a_prev = a;
    }
    return {Dm1, logs};
}

namespace {

// D(p + d)/D(p) without overflow
cplx det_ratio(const ScaledDet& num, const ScaledDet& den) {
    return num.mantissa / den.mantissa * std::exp(num.log_scale - den.log_scale);
}

// one Newton step on the determinant with a centered numerical derivative
cplx det_newton_step(cplx p, long N, const PhysicalParams& params,
                     const SpectralConstants& sc) {
    const double d = 1e-9 * std::max(1.0, std::abs(p));
    const ScaledDet f0 = strip_determinant(p, N, params, sc);
    const ScaledDet fp = strip_determinant(p + d, N, params, sc);
    const ScaledDet fm = strip_determinant(p - d, N, params, sc);
    const cplx rp = det_ratio(fp, f0), rm = det_ratio(fm, f0);
    return 2.0 * d / (rp - rm);   // f / f' = 2d / (D+/D - D-/D)
}

} // namespace

namespace {

// coarse |det| scan over the strip; used when the perturbative seed is
// outside its convergence radius (|alpha0| beyond ~0.15)
bool locate_by_scan(const PhysicalParams& params, const SpectralConstants& sc,
                    long N, cplx& out) {
    double best = 1e300;
    cplx bestp;
    for (double re = -2.5; re < -0.01; re += 0.04) {
        for (double im = 0.02; im < params.omega * 0.999; im += 0.02 * params.omega) {
            const ScaledDet d = strip_determinant(cplx(re, im), N, params, sc);
            const double mag = std::log(std::abs(d.mantissa)) + d.log_scale;
            if (mag < best) {
                best = mag;
                bestp = cplx(re, im);
            }
        }
    }
    out = bestp;
    return best < -2.0;   // a genuine zero pulls |det| far below O(1)
}

} // namespace

PoleResult find_pole(const PhysicalParams& params, const SpectralConstants& sc, long N) {
    PoleResult res;
    if (params.alpha0 == 0.0) {
        res.seed = resonance_info(params).pbar;
        return res;     // decoupled system: no ell^2 kernel, no pole
    }
    res.seed = pole_seed(params, sc);
    bool wide_search = false;
    if (std::abs(params.alpha0) > 0.15 || res.seed.real() >= 0.0
        || res.seed.imag() <= 0.0 || res.seed.imag() >= params.omega) {
        cplx located;
        if (!locate_by_scan(params, sc, N, located))
            return res;
        res.seed = located;
        wide_search = true;
    }
    const double trust = wide_search ? 0.5 : 10.0 * params.alpha0 * params.alpha0;

    // (a) matching condition of the two continued fractions
    auto G = [&](cplx p) {
        return 1.0 / rho_cf(p, params) - omega_cf(p, params);
    };
    bool cf_ok = true;
    cplx cf = res.seed;
    try {
        cplx p1 = res.seed, p2 = res.seed + cplx(0.0, 0.05) * trust;
        cplx g1 = G(p1), g2 = G(p2);
        for (int it = 0; it < 100; ++it) {
            const cplx step = g2 * (p2 - p1) / (g2 - g1);
            const cplx p3 = p2 - step;
            p1 = p2; g1 = g2;
            p2 = p3; g2 = G(p3);
            if (std::abs(step) < 1e-13) break;
            if (std::abs(p2 - res.seed) > 2.0 * trust + 0.05) { cf_ok = false; break; }
        }
        cf = p2;
    } catch (const Error&) {
        cf_ok = false;
    }

    // (b) determinant Newton
    bool det_ok = true;
    cplx dp = res.seed;
    try {
        for (int it = 0; it < 100; ++it) {
            const cplx step = det_newton_step(dp, N, params, sc);
            dp -= step;
            if (std::abs(step) < 1e-13) break;
            if (std::abs(dp - res.seed) > 2.0 * trust + 0.05) { det_ok = false; break; }
        }
        // truncation stability: the root must not move under N doubling,
        // otherwise it is an artifact of the cutoff, not a resolvent pole
        const cplx root_N = dp;
        for (int it = 0; it < 40; ++it) {
            const cplx step = det_newton_step(dp, 2 * N, params, sc);
            dp -= step;
            if (std::abs(step) < 1e-13) break;
            if (std::abs(dp - root_N) > 1e-3) { det_ok = false; break; }
        }
        if (det_ok && std::abs(dp - root_N) > 1e-6) det_ok = false;
    } catch (const Error&) {
        det_ok = false;
    }

    if (!det_ok) return res;
    res.det_root = dp;
    res.p0 = dp;
    res.cf_converged = cf_ok && std::abs(cf - dp) < 1e-4;
    res.cf_root = res.cf_converged ? cf : dp;
    res.agree = res.cf_converged ? std::abs(cf - dp) : 0.0;
    if (!(res.p0.real() < 0.0) || !(res.p0.imag() > 0.0)
        || !(res.p0.imag() < params.omega))
        return res;

    const double d = std::min({std::max(4.0 * params.alpha0 * params.alpha0, 1e-4),
                               0.05, 0.5 * res.p0.imag(),
                               0.5 * (params.omega - res.p0.imag()),
                               0.5 * std::abs(res.p0.real())});
    Rectangle box{res.p0.real() - d, res.p0.real() + d,
                  res.p0.imag() - d, res.p0.imag() + d};
    res.winding = winding_count(params, sc, box, 400, N);
    res.found = (res.winding == 1);
    return res;
}

namespace {

// log D at a contour point; side resolves on-cut rows toward the rectangle
// interior (bottom edge: above; top edge: below).
cplx contour_logD(cplx p, Side side, long N, const PhysicalParams& params,
                  const SpectralConstants& sc) {
    const ScaledDet sd = strip_determinant(p, N, params, sc, side);
    return std::log(sd.mantissa) + sd.log_scale;
}

} // namespace

int winding_count(const PhysicalParams& params, const SpectralConstants& sc,
                  const Rectangle& rect, std::size_t M, long N) {
    if (!(rect.re_max > rect.re_min) || !(rect.im_max > rect.im_min))
        throw DomainError("winding_count: bad rectangle");

    struct Edge {
        cplx a, b;
        Side side;
    };
    const Edge edges[4] = {
        {{rect.re_min, rect.im_min}, {rect.re_max, rect.im_min}, Side::above},
        {{rect.re_max, rect.im_min}, {rect.re_max, rect.im_max}, Side::principal},
        {{rect.re_max, rect.im_max}, {rect.re_min, rect.im_max}, Side::below},
        {{rect.re_min, rect.im_max}, {rect.re_min, rect.im_min}, Side::principal},
    };

    std::size_t per_edge = std::max<std::size_t>(M / 4, 16);
    for (int attempt = 0; attempt < 6; ++attempt) {
        double total_arg = 0.0, total_logmod = 0.0;
        double vert_arg = 0.0;
        bool need_refine = false;
        for (int e = 0; e < 4 && !need_refine; ++e) {
            cplx prev = contour_logD(edges[e].a, edges[e].side, N, params, sc);
            const cplx first = prev;
            for (std::size_t k = 1; k <= per_edge; ++k) {
                const double s = double(k) / double(per_edge);
                const cplx p = edges[e].a + s * (edges[e].b - edges[e].a);
                const cplx cur = contour_logD(p, edges[e].side, N, params, sc);
                double darg = cur.imag() - prev.imag();
                while (darg > M_PI) darg -= 2.0 * M_PI;
                while (darg < -M_PI) darg += 2.0 * M_PI;
                if (std::abs(darg) > M_PI / 3.0) { need_refine = true; break; }
                total_arg += darg;
                if (e == 1 || e == 3) vert_arg += darg;
                total_logmod += cur.real() - prev.real();
                prev = cur;
            }
            (void)first;
        }
        if (need_refine) {
            per_edge *= 4;
            if (per_edge > 200000)
                throw ConvergenceError("winding_count: contour passes too close to a zero");
            continue;
        }
        const double wind = total_arg / (2.0 * M_PI);
        const long rounded = std::lround(wind);
        if (std::abs(wind - double(rounded)) > 0.2 || std::abs(total_logmod) > 0.2)
            throw ConvergenceError("winding_count: non-integer winding", wind);
        // on a full-strip rectangle, the horizontal edges cancel by the
        // i omega shift conjugation; cross-check with the vertical sides
        if (rect.im_min < 1e-9 && std::abs(rect.im_max - params.omega) < 1e-9) {
            if (std::abs(vert_arg / (2.0 * M_PI) - double(rounded)) > 0.25)
                throw ConvergenceError("winding_count: vertical-side check failed",
                                       vert_arg / (2.0 * M_PI));
        }
        return int(rounded);
    }
    throw ConvergenceError("winding_count: refinement cap reached");
}

ResidueSet residues(const PoleResult& pr, const PhysicalParams& params,
                    const SpectralConstants& sc, long N, double radius, std::size_t M) {
    if (!pr.found)
        throw DomainError("residues: no pole available");
    M = std::max<std::size_t>(M, 64);
    const cplx p0 = pr.p0;
    const ResonanceInfo res = resonance_info(params);
    if (radius <= 0.0) {
        radius = std::min({0.1, p0.imag(), params.omega - p0.imag()}) / 2.0;
        radius = std::min(radius, 0.8 * std::abs(p0 - res.pbar));
    }

    auto ring = [&](std::size_t nodes) {
        std::vector<cplx> acc(std::size_t(2 * N + 1), 0.0);
        for (std::size_t k = 0; k < nodes; ++k) {
            const double th = 2.0 * M_PI * double(k) / double(nodes);
            const cplx e(std::cos(th), std::sin(th));
            const StripSolution s = solve_strip(p0 + radius * e, N, params, sc,
                                                Side::principal, false);
            for (std::size_t i = 0; i < acc.size(); ++i)
                acc[i] += s.qhat[i] * e;
        }
        for (auto& v : acc) v *= radius / double(nodes);
        return acc;
    };
    const std::vector<cplx> R1 = ring(M);
    const std::vector<cplx> R2 = ring(2 * M);
    if (std::abs(R1[std::size_t(N)] - R2[std::size_t(N)]) > 1e-6)
        throw ConvergenceError("residues: contour contaminated (node doubling moved R0)",
                               std::abs(R1[std::size_t(N)] - R2[std::size_t(N)]));

    ResidueSet out;
    out.p0 = p0;
    for (long n = -N; n <= N; ++n)
        out.R[n] = R2[std::size_t(n + N)];
    for (long n = -N + 1; n <= N - 1; ++n) {
        const cplx ah = params.alpha0 * h_fn(p0 + cplx(0.0, params.omega * double(n)));
        const cplx r = out.R[n] + ah * (out.R[n + 1] - out.R[n - 1]);
        out.recursion_residual = std::max(out.recursion_residual, std::abs(r));
    }
    for (long n = -N; n <= N; ++n)
        out.decay_constant = std::max(out.decay_constant,
                                      double(std::abs(double(n))) * std::abs(out.R[n]));
    return out;
}

std::vector<double> default_tau_grid(double t, double tau_min, std::size_t per_decade) {
    const double tau_max = std::max(28.0 / std::max(t, 1.0), 0.05);
    const double fac = std::pow(10.0, 1.0 / double(per_decade));
    const double lin = 0.15 / std::max(t, 1.0);
    std::vector<double> g{tau_min};
    while (g.back() < tau_max)
        g.push_back(std::min(g.back() * fac, g.back() + lin));
    return g;
}

BranchTable make_branch_table(const PhysicalParams& params, const SpectralConstants& sc,
                              long n_cut, const std::vector<double>& tau_grid, long N) {
    if (tau_grid.size() < 3)
        throw GridError("make_branch_table: tau grid too short");
    N = std::max(N, n_cut + 8);
    BranchTable tab;
    tab.n_cut = n_cut;
    for (double tau : tau_grid) {
        StripSolution up, dn;
        try {
            up = qhat_boundary(tau, params, sc, Side::above, N);
            dn = qhat_boundary(tau, params, sc, Side::below, N);
        } catch (const DomainError&) {
            continue;    // tau node collided with a singular point; skip it
        }
        std::vector<cplx> J(std::size_t(2 * n_cut + 1));
        for (long n = -n_cut; n <= n_cut; ++n) {
            const cplx P(-tau, params.omega * double(n));
            const cplx z2p = z2_hat(P, sc, Side::above);
            const cplx z2m = z2_hat(P, sc, Side::below);
            J[std::size_t(n + n_cut)] = z2p * up.at(n) - z2m * dn.at(n);
        }
        tab.tau.push_back(tau);
        tab.jump.push_back(std::move(J));
    }
    return tab;
}

ReconstructedZ reconstruct_Z(double t, const PoleResult& pr, const ResidueSet& rs,
                             const PhysicalParams& params, const SpectralConstants& sc,
                             const BranchTable& table) {
    if (t < 5.0)
        throw DomainError("reconstruct_Z: requires t >= 5");
    const long n_cut = table.n_cut;

    ReconstructedZ out;
    cplx last_ring = 0.0;

    if (pr.found) {
        for (long n = -n_cut; n <= n_cut; ++n) {
            auto it = rs.R.find(n);
            if (it == rs.R.end())
                throw GridError("reconstruct_Z: residue ring not available");
            const cplx pn = pr.p0 + cplx(0.0, params.omega * double(n));
            const cplx term = cplx(0.0, 2.0 * M_PI) * z2_hat(pn, sc) * it->second
                            * std::exp(pn * t);
            out.pole_sum += term;
            if (std::abs(n) == n_cut) last_ring += term;
        }
    }

    // exp-weighted trapezoid over the tabulated jumps, truncated where the
    // weight is negligible
    std::vector<cplx> ring_int(std::size_t(2 * n_cut + 1), 0.0);
    for (std::size_t k = 0; k + 1 < table.tau.size(); ++k) {
        const double ta = table.tau[k], tb = table.tau[k + 1];
        const double wa = std::exp(-ta * t), wb = std::exp(-tb * t);
        if (wa < 1e-12) break;
        const double w = 0.5 * (tb - ta);
        for (std::size_t i = 0; i < ring_int.size(); ++i)
            ring_int[i] += w * (wa * table.jump[k][i] + wb * table.jump[k + 1][i]);
    }
    // the cut excursions of the leftward-closed inversion contour carry a
    // minus sign relative to the pole residues
    for (long n = -n_cut; n <= n_cut; ++n) {
        const cplx term = -std::exp(cplx(0.0, params.omega * double(n) * t))
                        * ring_int[std::size_t(n + n_cut)];
        out.branch_sum += term;
        if (std::abs(n) == n_cut) last_ring += term;
    }

    out.z = (out.pole_sum + out.branch_sum) / cplx(0.0, 2.0 * M_PI);
    const double zmag = std::abs(out.pole_sum + out.branch_sum);
    out.last_ring_fraction = zmag > 0.0 ? std::abs(last_ring) / zmag : 0.0;
    return out;
}

ReconstructedZ reconstruct_Z(double t, const PoleResult& pr, const ResidueSet& rs,
                             const PhysicalParams& params, const SpectralConstants& sc,
                             long n_cut, const std::vector<double>& tau_grid, long N) {
    return reconstruct_Z(t, pr, rs, params, sc,
                         make_branch_table(params, sc, n_cut, tau_grid, N));
}

} // namespace tdpi
