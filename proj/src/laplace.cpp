#include "tdpi/laplace.hpp"
#include "tdpi/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tdpi {

namespace {

const double kSingularTol = 1e-10;

// distance to the coefficient singularities {i omega n} and {p_s - i omega n}
void reject_singular(cplx p, const PhysicalParams& params, const SpectralConstants& sc,
                     long N) {
    for (long n = -N - 2; n <= N + 2; ++n) {
        const cplx Pn = p + cplx(0.0, params.omega * double(n));
        if (std::abs(Pn) < kSingularTol)
            throw DomainError("strip system: p within 1e-10 of a branch point");
        if (std::abs(Pn - sc.p_s) < kSingularTol)
            throw DomainError("strip system: p within 1e-10 of a singular coefficient point");
    }
}

// complex tridiagonal solve with partial pivoting (one fill-in diagonal)
void tridiag_solve(std::vector<cplx>& dl, std::vector<cplx>& d,
                   std::vector<cplx>& du, std::vector<cplx>& rhs) {
    const std::size_t m = d.size();
    std::vector<cplx> du2(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (std::abs(d[i]) < std::abs(dl[i + 1])) {
            std::swap(d[i], dl[i + 1]);
            std::swap(du[i], d[i + 1]);
            if (i + 2 < m) du2[i] = du[i + 1], du[i + 1] = 0.0;
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (std::abs(d[i]) < 1e-300)
            throw ConvergenceError("strip system: near-singular pivot (pole or pbar nearby)");
        const cplx f = dl[i + 1] / d[i];
        d[i + 1] -= f * du[i];
        if (i + 2 < m) du[i + 1] -= f * du2[i];
        rhs[i + 1] -= f * rhs[i];
    }
    if (std::abs(d[m - 1]) < 1e-300)
        throw ConvergenceError("strip system: near-singular pivot (pole or pbar nearby)");
    rhs[m - 1] /= d[m - 1];
    if (m >= 2)
        rhs[m - 2] = (rhs[m - 2] - du[m - 2] * rhs[m - 1]) / d[m - 2];
    for (std::size_t k = m - 2; k-- > 0;)
        rhs[k] = (rhs[k] - du[k] * rhs[k + 1] - du2[k] * rhs[k + 2]) / d[k];
}

std::vector<cplx> strip_once(cplx p, long N, const PhysicalParams& params,
                             const SpectralConstants& sc, Side side) {
    const std::size_t m = std::size_t(2 * N + 1);
    std::vector<cplx> dl(m, 0.0), d(m, 1.0), du(m, 0.0), rhs(m);
    for (long n = -N; n <= N; ++n) {
        const std::size_t i = std::size_t(n + N);
        const cplx a = params.alpha0 * h_fn(p + cplx(0.0, params.omega * double(n)), side);
        if (i > 0) dl[i] = -a;
        if (i + 1 < m) du[i] = a;
        rhs[i] = g_hat(p, n, sc, params, side);
    }
    tridiag_solve(dl, d, du, rhs);
    return rhs;
}

} // namespace

cplx h_fn(cplx p, Side side) {
    if (std::abs(p) < kSingularTol)
        throw DomainError("h_fn: p at the branch point 0");
    if (std::abs(p - cplx(0.0, std::exp(2.0 * (std::log(2.0) - euler_gamma)))) < kSingularTol)
        throw DomainError("h_fn: p at the singular point p_s");
    return cplx(0.0, 2.0 * M_PI) / (clog(p, side) + cplx(2.0 * euler_gamma - 2.0 * std::log(2.0), -M_PI_2));
}

cplx z2_hat(cplx p, const SpectralConstants& sc, Side side) {
    if (std::abs(p) < kSingularTol)
        throw DomainError("z2_hat: p at the branch point 0");
    const cplx pref = cplx(0.0, sc.c_alpha / (4.0 * M_PI));
    const cplx delta = p - sc.p_s;
    if (std::abs(delta) < 1e-4) {
        const cplx z = delta / sc.p_s;
        return pref / sc.p_s * (1.0 - z / 2.0 + z * z / 3.0);
    }
    const cplx num = clog(p, side) - std::log(sc.abs_lambda()) - cplx(0.0, M_PI_2);
    return pref * num / delta;
}

cplx f_hat(cplx p, const SpectralConstants& sc, Side side) {
    if (std::abs(p) < kSingularTol)
        throw DomainError("f_hat: p at the branch point 0");
    const cplx lg = clog(p, side);
    if (std::abs(lg) < kSingularTol)
        throw DomainError("f_hat: p at the pole p = 1 (log p = 0)");
    return cplx(0.0, -4.0 * M_PI) * z2_hat(p, sc, side) / lg;
}

cplx g_hat(cplx p, long n, const SpectralConstants& sc,
           const PhysicalParams& params, Side side) {
    const cplx P = p + cplx(0.0, params.omega * double(n));
    const cplx L = clog(P, side) + sc.four_pi_beta0();
    if (std::abs(L) < kSingularTol)
        throw DomainError("g_hat: p + i omega n at the singular point p_s");
    return cplx(0.0, -4.0 * M_PI) * z2_hat(P, sc, side) / L;
}

StripSolution solve_strip(cplx p, long N, const PhysicalParams& params,
                          const SpectralConstants& sc, Side side, bool refine) {
    N = std::max<long>(N, 16);
    reject_singular(p, params, sc, N);

    StripSolution sol;
    sol.p = p;
    std::vector<cplx> cur = strip_once(p, N, params, sc, side);
    if (!refine) {
        sol.N = N;
        sol.qhat = std::move(cur);
        sol.converged = true;
        sol.doubling_diff = 0.0;
        return sol;
    }
    for (;;) {
        const long N2 = 2 * N;
        std::vector<cplx> nxt = strip_once(p, N2, params, sc, side);
        double diff = 0.0;
        for (long n = -N; n <= N; ++n)
            diff = std::max(diff, std::abs(nxt[std::size_t(n + N2)] - cur[std::size_t(n + N)]));
        if (diff < 1e-8) {
            sol.N = N;
            sol.qhat = std::move(cur);
            sol.converged = true;
            sol.doubling_diff = diff;
            return sol;
        }
        if (N2 >= 2048) {
            sol.N = N2;
            sol.qhat = std::move(nxt);
            sol.converged = false;
            sol.doubling_diff = diff;
            return sol;
        }
        N = N2;
        cur = std::move(nxt);
    }
}

cplx qhat_at(cplx P, const PhysicalParams& params, const SpectralConstants& sc,
             long N, Side side) {
    const long ns = long(std::floor(P.imag() / params.omega));
    const cplx p = P - cplx(0.0, params.omega * double(ns));
    const StripSolution sol = solve_strip(p, N, params, sc, side);
    return sol.at(ns);
}

StripSolution qhat_boundary(double tau, const PhysicalParams& params,
                            const SpectralConstants& sc, Side side, long N) {
    if (!(tau > 0.0))
        throw DomainError("qhat_boundary: requires tau > 0");
    return solve_strip(cplx(-tau, 0.0), N, params, sc, side);
}

LaplaceValue numeric_laplace(const std::vector<double>& times,
                             const std::vector<cplx>& values, cplx p) {
    if (times.size() != values.size() || times.size() < 2)
        throw GridError("numeric_laplace: bad series");
    if (p.real() < 2.0)
        throw DomainError("numeric_laplace: requires Re p >= 2");
    const double T = times.back();
    const double nu = 1.5;
    if (std::exp((nu - p.real()) * T) >= 1e-8)
        throw AccuracyError("numeric_laplace: series too short for the tail bound",
                            std::exp((nu - p.real()) * T));
    const double h = times[1] - times[0];

    // panel-exact against linear interpolation of the series
    const cplx u = -p;
    cplx wl, wr;
    {
        const cplx x = u * h;
        if (std::abs(x) < 1e-6) {
            wl = h * 0.5 * (1.0 + x / 3.0);
            wr = h * 0.5 * (1.0 + 2.0 * x / 3.0);
        } else {
            const cplx e = std::exp(x);
            const cplx i1 = (e - 1.0) / u;
            const cplx i2 = (h * e - i1) / u;
            wr = i2 / h;
            wl = i1 - wr;
        }
    }
    const cplx step = std::exp(u * h);
    cplx phase = 1.0, acc = 0.0;
    for (std::size_t m = 0; m + 1 < times.size(); ++m) {
        acc += phase * (values[m] * wl + values[m + 1] * wr);
        phase *= step;
    }

    double Mhat = 0.0;
    for (std::size_t m = 0; m < times.size(); ++m)
        Mhat = std::max(Mhat, std::abs(values[m]) * std::exp(-nu * times[m]));
    const double tail = Mhat * std::exp((nu - p.real()) * T) / (p.real() - nu);
    return {acc, tail};
}

LaplaceValue numeric_laplace(const ChargeGrid& cg, cplx p) {
    return numeric_laplace(cg.times(), cg.q, p);
}

double functional_residual(cplx p, const ChargeGrid& cg,
                           const PhysicalParams& params, const SpectralConstants& sc) {
    if (p.real() < 2.0)
        throw DomainError("functional_residual: requires Re p >= 2");
    const cplx io(0.0, params.omega);
    const cplx qp = numeric_laplace(cg, p).value;
    const cplx qp_up = numeric_laplace(cg, p + io).value;
    const cplx qp_dn = numeric_laplace(cg, p - io).value;
    const cplx L = clog(p) + sc.four_pi_beta0();
    const cplx rhs = sc.c_alpha * (clog(p) - std::log(sc.abs_lambda()) - cplx(0.0, M_PI_2))
                   / (L * (p - sc.p_s));
    const cplx lhs = qp + cplx(0.0, 2.0 * M_PI) * params.alpha0 / L * (qp_up - qp_dn);
    return std::abs(lhs - rhs);
}

namespace {

// one-sided auxiliary systems of the near-origin representation; sign = +1
// solves rows n = 1..N, sign = -1 rows n = -1..-N. Unit injection at the
// removed row feeds tau; ghat forcing feeds R.
void one_sided(cplx p, int sign, long N, const PhysicalParams& params,
               const SpectralConstants& sc, cplx& tau1, cplx& R1) {
    const std::size_t m = std::size_t(N);
    std::vector<cplx> a(m + 1);
    for (long k = 1; k <= N; ++k)
        a[std::size_t(k)] = params.alpha0
            * h_fn(p + cplx(0.0, params.omega * double(sign) * double(k)));

    // variables x_k = hat(tau)_{sign k} or hat(R)_{sign k}, k = 1..N
    // row k >= 2: x_k + sign a_k (x_{k+1} - x_{k-1}) = rhs_k
    // row 1:      x_1 + sign a_1 x_2 = rhs_1  (x_0 contribution moved to rhs)
    auto solve = [&](std::vector<cplx> rhs) {
        std::vector<cplx> dl(m, 0.0), d(m, 1.0), du(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const cplx ak = double(sign) * a[i + 1];
            if (i > 0) dl[i] = -ak;
            if (i + 1 < m) du[i] = ak;
        }
        tridiag_solve(dl, d, du, rhs);
        return rhs;
    };

    // tau system: homogeneous with x_0 = 1: row 1 rhs = sign a_1
    std::vector<cplx> rt(m, 0.0);
    rt[0] = double(sign) * a[1];
    // R system: ghat forcing with x_0 = 0
    std::vector<cplx> rr(m);
    for (long k = 1; k <= N; ++k)
        rr[std::size_t(k - 1)] = g_hat(p, sign * k, sc, params);

    tau1 = solve(std::move(rt))[0];
    R1 = solve(std::move(rr))[0];
}

} // namespace

NearZeroRep near_zero_rep(cplx p, const PhysicalParams& params,
                          const SpectralConstants& sc, long N) {
    const ResonanceInfo res = resonance_info(params);
    if (res.resonant)
        throw ResonanceError("near_zero_rep: resonant frequency", res.nbar);
    if (!(std::abs(p) > 0.0) || std::abs(p) > 1e-2 || p.real() <= 0.0)
        throw DomainError("near_zero_rep: requires 0 < |p| <= 1e-2, Re p > 0");
    N = std::max<long>(N, 16);

    auto assemble = [&](long NN) {
        cplx t1, R1, tm1, Rm1;
        one_sided(p, +1, NN, params, sc, t1, R1);
        one_sided(p, -1, NN, params, sc, tm1, Rm1);
        const cplx tpia(0.0, 2.0 * M_PI * params.alpha0);
        return std::pair<cplx, cplx>{sc.four_pi_beta0() + tpia * (t1 - tm1),
                                     -tpia * (R1 - Rm1)};
    };
    auto [Q, H] = assemble(N);
    for (;;) {
        auto [Q2, H2] = assemble(2 * N);
        const double d = std::abs(Q2 - Q) + std::abs(H2 - H);
        Q = Q2;
        H = H2;
        if (d < 1e-10) break;
        N *= 2;
        if (N >= 2048)
            throw ConvergenceError("near_zero_rep: auxiliary systems did not stabilize", d);
    }

    NearZeroRep rep;
    rep.Q = Q;
    rep.H = H;
    const cplx num = H - cplx(0.0, 4.0 * M_PI) * z2_hat(p, sc);
    rep.qhat0 = num / (Q + clog(p));
    const StripSolution direct = solve_strip(p, N, params, sc);
    rep.q0_check = std::abs(direct.at(0) * (Q + clog(p)) - num);
    return rep;
}

} // namespace tdpi
