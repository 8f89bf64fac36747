#include <doctest.h>

#include "tdpi/errors.hpp"
#include "tdpi/laplace.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace tdpi;

namespace {

PhysicalParams bench(double a0, double om = 2.0) {
    PhysicalParams p;
    p.alpha0 = a0;
    p.omega = om;
    return p;
}

// shared moderate-coupling charge run reaching into the transform window
const ChargeGrid& transform_grid() {
    static const ChargeGrid g = [] {
        const PhysicalParams p = bench(0.3);
        return solve_charge(p, spectral_constants(p), 40.0, 2e-3);
    }();
    return g;
}

} // namespace

TEST_CASE("h function") {
    const SpectralConstants sc = spectral_constants(0.0);
    const cplx expect = cplx(0.0, 2.0 * M_PI) / sc.four_pi_beta0();
    CHECK(std::abs(h_fn(cplx(1.0, 0.0)) - expect) < 1e-12);
    CHECK(std::abs(h_fn(cplx(1e12, 0.0))) < std::abs(h_fn(cplx(1e4, 0.0))));
    CHECK(std::abs(h_fn(cplx(1e4, 0.0))) < std::abs(h_fn(cplx(5.0, 0.0))));
    CHECK(std::abs(h_fn(sc.p_s * (1.0 + 1e-6))) > 1e5);
    CHECK_THROWS_AS(h_fn(sc.p_s), DomainError);
    CHECK_THROWS_AS(h_fn(cplx(0.0, 0.0)), DomainError);
}

TEST_CASE("Z2 transform") {
    const SpectralConstants sc = spectral_constants(0.0);
    // removable point: exact value i C / (4 pi p_s)
    const cplx at_ps = cplx(0.0, sc.c_alpha / (4.0 * M_PI)) / sc.p_s;
    CHECK(std::abs(z2_hat(sc.p_s, sc) - at_ps) < 1e-12);
    CHECK(std::abs(z2_hat(sc.p_s * (1.0 + 1e-8), sc) - at_ps) < 1e-7);
    // continuity across the seam of the Taylor switch
    CHECK(std::abs(z2_hat(sc.p_s + cplx(0.99e-4, 0.0), sc)
                   - z2_hat(sc.p_s + cplx(1.01e-4, 0.0), sc)) < 1e-10);
    // continuous across Im p = omega n for n != 0 (no cut off the negative axis)
    const cplx a = z2_hat(cplx(-3.0, 2.0), sc, Side::above);
    const cplx b = z2_hat(cplx(-3.0, 2.0), sc, Side::below);
    CHECK(std::abs(a - b) == 0.0);
    // |Z2| ~ log p / p along the positive reals
    const double r1 = std::abs(z2_hat(cplx(1e3, 0.0), sc)) * 1e3 / std::log(1e3);
    const double r2 = std::abs(z2_hat(cplx(1e6, 0.0), sc)) * 1e6 / std::log(1e6);
    CHECK(r1 == doctest::Approx(r2).epsilon(0.05));
    CHECK_THROWS_AS(z2_hat(cplx(0.0, 0.0), sc), DomainError);
}

TEST_CASE("forcing transform") {
    const SpectralConstants sc = spectral_constants(0.0);
    // the two algebraic routes agree away from the special points
    const cplx p(2.0, 1.0);
    const cplx direct = sc.c_alpha * (clog(p) - std::log(sc.abs_lambda()) - cplx(0.0, M_PI_2))
                      / (clog(p) * (p - sc.p_s));
    CHECK(std::abs(f_hat(p, sc) - direct) < 1e-12);
    CHECK(std::abs(f_hat(cplx(50.0, 0.0), sc)) < std::abs(f_hat(cplx(5.0, 0.0), sc)));
    // f has the e^t growth pole where log p vanishes
    CHECK_THROWS_AS(f_hat(cplx(1.0, 0.0), sc), DomainError);
    CHECK_THROWS_AS(f_hat(cplx(0.0, 0.0), sc), DomainError);

    // numeric transform of the forcing series
    const double h = 2e-3;
    const std::size_t n = 20000;
    const NuTable nu = nu_table(h, n);
    std::vector<double> times(n + 1);
    for (std::size_t j = 0; j <= n; ++j) times[j] = h * double(j);
    const std::vector<cplx> f = forcing_f(times, sc, nu);
    const cplx pt(2.5, 0.0);
    const LaplaceValue lv = numeric_laplace(times, f, pt);
    CHECK(std::abs(lv.value - f_hat(pt, sc)) < lv.tail_bound + 1e-4);
}

TEST_CASE("strip forcing") {
    const PhysicalParams p = bench(0.3);
    const SpectralConstants sc = spectral_constants(p);
    const cplx pt(0.7, 0.5);
    // definition chase: g_0 = -4 pi i Z2 / (log p + 4 pi beta0)
    const cplx g0 = g_hat(pt, 0, sc, p);
    const cplx ref = cplx(0.0, -4.0 * M_PI) * z2_hat(pt, sc)
                   / (clog(pt) + sc.four_pi_beta0());
    CHECK(std::abs(g0 - ref) < 1e-13);
    // O(log|n|/|n|) falloff
    const double a100 = std::abs(g_hat(pt, 100, sc, p));
    const double a1000 = std::abs(g_hat(pt, 1000, sc, p));
    const double model = (std::log(1000.0) / 1000.0) / (std::log(100.0) / 100.0);
    CHECK(a1000 / a100 == doctest::Approx(model).epsilon(0.25));
    // square-summability: doubling the range barely moves the partial sum
    auto sum2 = [&](long N) {
        double s = 0.0;
        for (long n = -N; n <= N; ++n) s += std::norm(g_hat(pt, n, sc, p));
        return s;
    };
    const double s512 = sum2(512), s1024 = sum2(1024);
    CHECK((s1024 - s512) / s512 < 5e-3);
}

TEST_CASE("strip system solve") {
    const PhysicalParams p = bench(0.4);
    const SpectralConstants sc = spectral_constants(p);
    const cplx pt(0.35, 0.8);

    // alpha0 = 0 decouples: qhat_n = ghat_n
    const PhysicalParams p0 = bench(0.0);
    const SpectralConstants sc0 = spectral_constants(p0);
    const StripSolution s0 = solve_strip(pt, 16, p0, sc0);
    for (long n = -10; n <= 10; ++n)
        CHECK(std::abs(s0.at(n) - g_hat(pt, n, sc0, p0)) < 1e-14);

    // dense oracle at N = 8
    {
        const long N = 8;
        const std::size_t m = 17;
        std::vector<std::vector<cplx>> A(m, std::vector<cplx>(m, 0.0));
        std::vector<cplx> rhs(m);
        for (long n = -N; n <= N; ++n) {
            const std::size_t i = std::size_t(n + N);
            A[i][i] = 1.0;
            const cplx a = p.alpha0 * h_fn(pt + cplx(0.0, p.omega * double(n)));
            if (i + 1 < m) A[i][i + 1] = a;
            if (i > 0) A[i][i - 1] = -a;
            rhs[i] = g_hat(pt, n, sc, p);
        }
        const std::vector<cplx> dense = oracle::dense_solve(A, rhs);
        const StripSolution trid = solve_strip(pt, N, p, sc, Side::principal, false);
        for (std::size_t i = 0; i < m; ++i)
            CHECK(std::abs(dense[i] - trid.qhat[i]) < 1e-12);
    }

    // truncation stability
    const StripSolution s = solve_strip(pt, 32, p, sc);
    CHECK(s.converged);
    CHECK(s.doubling_diff < 1e-8);

    // residual of the tridiagonal equations
    for (long n = -s.N + 1; n <= s.N - 1; ++n) {
        const cplx a = p.alpha0 * h_fn(pt + cplx(0.0, p.omega * double(n)));
        const cplx r = s.at(n) + a * (s.at(n + 1) - s.at(n - 1)) - g_hat(pt, n, sc, p);
        CHECK(std::abs(r) < 1e-11);
    }

    // singular points are rejected, not regularized
    CHECK_THROWS_AS(solve_strip(cplx(0.0, 0.0), 16, p, sc), DomainError);
    CHECK_THROWS_AS(solve_strip(sc.p_s - cplx(0.0, p.omega) * 0.0, 16, p, sc), DomainError);

    // reality structure of the coefficients on the upper imaginary axis
    const double xi = 0.37 * p.omega;
    for (long n = 0; n <= 5; ++n) {
        const cplx L = clog(cplx(0.0, xi + p.omega * double(n))) + sc.four_pi_beta0();
        CHECK(std::abs(L.imag()) < 1e-14);
        CHECK(L.real() == doctest::Approx(std::log(xi + p.omega * double(n))
                                          - 2.0 * std::log(2.0) + 2.0 * euler_gamma));
    }
}

TEST_CASE("qhat reduction and decay") {
    const PhysicalParams p = bench(0.3);
    const SpectralConstants sc = spectral_constants(p);
    const cplx pt(0.6, 0.9);
    const StripSolution s = solve_strip(pt, 64, p, sc);
    CHECK(std::abs(qhat_at(pt + cplx(0.0, p.omega), p, sc, 64) - s.at(1)) < 1e-9);

    // transform consistency at Re P = 3 and vanishing limit to the far left
    const LaplaceValue lv = numeric_laplace(transform_grid(), cplx(3.0, 0.4));
    CHECK(std::abs(qhat_at(cplx(3.0, 0.4), p, sc, 64) - lv.value) < lv.tail_bound + 1e-3);
    CHECK(std::abs(qhat_at(cplx(-30.0, 0.8), p, sc, 64)) < 1e-2);

    // boundary values jump across the cut for alpha0 != 0 and reduce to the
    // forcing jump when the system decouples
    const StripSolution up = qhat_boundary(1.3, p, sc, Side::above, 48);
    const StripSolution dn = qhat_boundary(1.3, p, sc, Side::below, 48);
    CHECK(std::abs(up.at(0) - dn.at(0)) > 1e-4);
    const PhysicalParams p0 = bench(0.0);
    const SpectralConstants sc0 = spectral_constants(p0);
    const StripSolution u0 = qhat_boundary(1.3, p0, sc0, Side::above, 48);
    for (long n : {-3L, 0L, 2L})
        CHECK(std::abs(u0.at(n) - g_hat(cplx(-1.3, 0.0), n, sc0, p0, Side::above)) < 1e-13);

    // sup_n |n qhat^{+-}(beta_n - tau)| stays bounded
    double sup = 0.0;
    for (double tau : {0.2, 1.0, 5.0, 20.0}) {
        const StripSolution b = qhat_boundary(tau, p, sc, Side::above, 64);
        for (long n = -48; n <= 48; ++n)
            if (n != 0) sup = std::max(sup, std::abs(double(n)) * std::abs(b.at(n)));
    }
    CHECK(std::isfinite(sup));
    CHECK(sup < 50.0);
}

TEST_CASE("numeric laplace transform") {
    const std::size_t n = 20000;
    const double h = 2e-3;
    std::vector<double> times(n + 1);
    std::vector<cplx> ones(n + 1, 1.0);
    for (std::size_t j = 0; j <= n; ++j) times[j] = h * double(j);
    const cplx p(2.0, 0.7);
    const LaplaceValue lv = numeric_laplace(times, ones, p);
    CHECK(std::abs(lv.value - 1.0 / p) < lv.tail_bound + 1e-8);

    const SpectralConstants sc = spectral_constants(0.0);
    std::vector<cplx> rot(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        rot[j] = sc.c_alpha * std::exp(cplx(0.0, -sc.lambda_alpha * times[j]));
    const LaplaceValue lr = numeric_laplace(times, rot, cplx(2.5, 0.0));
    CHECK(std::abs(lr.value - sc.c_alpha / (cplx(2.5, 0.0) - sc.p_s)) < lr.tail_bound + 1e-7);

    CHECK_THROWS_AS(numeric_laplace(times, ones, cplx(1.5, 0.0)), DomainError);
    std::vector<double> shrt{0.0, h, 2 * h};
    std::vector<cplx> shv{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(numeric_laplace(shrt, shv, p), AccuracyError);
}

TEST_CASE("functional equation residual") {
    // alpha0 = 0 reduces to the forcing identity
    const PhysicalParams p0 = bench(0.0);
    const SpectralConstants sc0 = spectral_constants(p0);
    const ChargeGrid g0 = solve_charge(p0, sc0, 40.0, 2e-3);
    CHECK(functional_residual(cplx(2.5, 0.0), g0, p0, sc0) < 1e-6);

    // moderate driving
    const PhysicalParams p = bench(0.3);
    const SpectralConstants sc = spectral_constants(p);
    const double res = functional_residual(cplx(2.0, 0.3), transform_grid(), p, sc);
    CHECK(res < 1e-3);

    // sensitivity control: swapping the shifted transforms breaks the identity
    const cplx pt(2.0, 0.3);
    const cplx io(0.0, p.omega);
    const cplx qp = numeric_laplace(transform_grid(), pt).value;
    const cplx up = numeric_laplace(transform_grid(), pt + io).value;
    const cplx dn = numeric_laplace(transform_grid(), pt - io).value;
    const cplx L = clog(pt) + sc.four_pi_beta0();
    const cplx rhs = sc.c_alpha * (clog(pt) - std::log(sc.abs_lambda()) - cplx(0.0, M_PI_2))
                   / (L * (pt - sc.p_s));
    const double swapped = std::abs(qp + cplx(0.0, 2.0 * M_PI) * p.alpha0 / L * (dn - up) - rhs);
    CHECK(swapped > 10.0 * res);
}

TEST_CASE("near-origin representation") {
    const PhysicalParams p = bench(0.3);
    const SpectralConstants sc = spectral_constants(p);
    const NearZeroRep rep = near_zero_rep(cplx(1e-4, 0.0), p, sc, 64);
    CHECK(rep.q0_check < 1e-8);

    // alpha0 = 0: H = 0, Q = 4 pi beta0, qhat_0 = ghat_0
    const PhysicalParams p0 = bench(0.0);
    const SpectralConstants sc0 = spectral_constants(p0);
    const NearZeroRep r0 = near_zero_rep(cplx(1e-4, 0.0), p0, sc0, 32);
    CHECK(std::abs(r0.H) < 1e-14);
    CHECK(std::abs(r0.Q - sc0.four_pi_beta0()) < 1e-14);
    CHECK(std::abs(r0.qhat0 - g_hat(cplx(1e-4, 0.0), 0, sc0, p0)) < 1e-10);

    // resonant frequency is refused
    PhysicalParams pr = bench(0.3, std::exp(2.0 * (std::log(2.0) - euler_gamma)) / 2.0);
    CHECK_THROWS_AS(near_zero_rep(cplx(1e-4, 0.0), pr, spectral_constants(pr), 32),
                    ResonanceError);
    CHECK_THROWS_AS(near_zero_rep(cplx(0.1, 0.0), p, sc, 32), DomainError);

    // analyticity proxy: Cauchy-Riemann residual of qhat_0 in the right half-plane
    const double d = 1e-5;
    const cplx c(0.5, 0.7);
    auto q0 = [&](cplx z) { return solve_strip(z, 48, p, sc).at(0); };
    const cplx dre = (q0(c + d) - q0(c - d)) / (2.0 * d);
    const cplx dim = (q0(c + cplx(0.0, d)) - q0(c - cplx(0.0, d))) / (2.0 * cplx(0.0, d));
    CHECK(std::abs(dre - dim) < 1e-5);

    // ell^2 membership on the imaginary axis off the singular points
    const cplx axis(0.0, 0.41 * p.omega);
    auto sum2 = [&](long N) {
        const StripSolution s = solve_strip(axis, N, p, sc, Side::principal, false);
        double acc = 0.0;
        for (long n = -N; n <= N; ++n) acc += std::norm(s.at(n));
        return acc;
    };
    const double a = sum2(256), b = sum2(512);
    CHECK(std::abs(b - a) / a < 1e-6);
}
