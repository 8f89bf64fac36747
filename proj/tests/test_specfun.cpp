#include <doctest.h>

#include "tdpi/errors.hpp"
#include "tdpi/specfun.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace tdpi;

TEST_CASE("gamma function") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-2.5), DomainError);
}

TEST_CASE("volterra mu defining integral") {
    CHECK(volterra_mu(0.0, 0.0, 0.0) == 0.0);
    CHECK(volterra_mu(0.0, 2.0, 1.0) == 0.0);
    CHECK_THROWS_AS(volterra_mu(0.0, 0.0, -1.0), DomainError);

    // golden constant mu(1,0,0) = int_0^inf ds/Gamma(s+1)
    CHECK(volterra_mu(1.0, 0.0, 0.0)
          == doctest::Approx(2.26653450769984884).epsilon(1e-11));

    // antiderivative identity: int_0^x mu(s,0,-1) ds = mu(x,0,0);
    // the (0,eps) head is taken from the delta=0 branch, the rest by
    // quadrature of the delta=-1 branch in u = log s.
    for (double x : {0.5, 1.0, 2.0}) {
        const double eps = 1e-6;
        const double head = volterra_mu(eps, 0.0, 0.0);
        const double body = oracle::integrate(
            [&](double u) {
                const double s = std::exp(u);
                return volterra_mu(s, 0.0, -1.0) * s;
            },
            std::log(eps), std::log(x), 1e-10);
        CHECK(head + body == doctest::Approx(volterra_mu(x, 0.0, 0.0)).epsilon(2e-7));
    }
}

TEST_CASE("mu semigroup identity") {
    // int_0^t mu(t-s,0,-1) mu(s,m-1,0) ds = mu(t,m,0)
    for (double t : {0.5, 1.0}) {
        for (int m : {1, 2}) {
            const double eps = 1e-8;
            const double head = volterra_mu(eps, 0.0, 0.0) * volterra_mu(t, m - 1.0, 0.0);
            const double body = oracle::integrate(
                [&](double u) {
                    const double s = std::exp(u);   // s = kernel argument t - tau
                    return volterra_mu(s, 0.0, -1.0) * volterra_mu(t - s, m - 1.0, 0.0) * s;
                },
                std::log(eps), std::log(t), 1e-9);
            CHECK(head + body == doctest::Approx(volterra_mu(t, double(m), 0.0)).epsilon(1e-6));
        }
    }
}

TEST_CASE("nu via branch representation vs defining integral") {
    for (double t : {0.05, 0.3, 1.0, 4.0, 20.0}) {
        const double ref = volterra_mu(t, 0.0, 0.0);
        CHECK(volterra_nu(t) == doctest::Approx(ref).epsilon(1e-9));
    }
    CHECK(volterra_nu(0.1) == doctest::Approx(0.456993160874612371).epsilon(1e-10));
}

TEST_CASE("nu table") {
    const NuTable tab = nu_table(0.1, 10);
    CHECK(tab.values[0] == 0.0);
    CHECK(tab.cumulative[0] == 0.0);
    for (std::size_t j = 1; j < tab.values.size(); ++j) {
        CHECK(tab.values[j] > tab.values[j - 1]);
        CHECK(tab.cumulative[j] >= tab.cumulative[j - 1]);
    }
    CHECK(tab.values[1] == doctest::Approx(volterra_mu(0.1, 0.0, 0.0)).epsilon(1e-9));

    // cumulative against direct quadrature of nu
    const double ref = oracle::integrate([](double s) { return volterra_nu(s); },
                                         0.0, 1.0, 1e-11);
    CHECK(tab.cumulative[10] == doctest::Approx(ref).epsilon(1e-9));

    // nu(t) ~ e^t: ratio of adjacent samples near t = 30
    const NuTable big = nu_table(0.5, 62);
    const double ratio = big.values[61] / big.values[60];
    CHECK(ratio == doctest::Approx(std::exp(0.5)).epsilon(0.1));

    CHECK_THROWS_AS(nu_table(1.0, 51), DomainError);
    CHECK_THROWS_AS(nu_table(0.0, 5), DomainError);
}

TEST_CASE("normalizing identity: I * (-gamma - log) = 1") {
    // int_0^t I(t-tau)(-gamma - log tau) dtau = 1; both singular ends are
    // capped analytically, the middle goes through adaptive quadrature.
    for (double t : {0.05, 0.2, 1.0, 3.0, 5.0}) {
        const double eps = 1e-7, del = 1e-10;
        // s near 0 (tau near t): kernel mass nu(eps) times smooth factor
        const double head = volterra_nu(eps) * (-euler_gamma - std::log(t - 0.5 * eps));
        // tau near 0: I(t-tau) ~ I(t), log integrates to del(1-gamma-log del)
        const double tail = volterra_mu(t, 0.0, -1.0) * del * (1.0 - euler_gamma - std::log(del));
        const double mid = oracle::integrate(
            [&](double u) {
                const double s = std::exp(u);
                return volterra_mu(s, 0.0, -1.0) * (-euler_gamma - std::log(t - s)) * s;
            },
            std::log(eps), std::log(t - del), 1e-9);
        CHECK(head + mid + tail == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("laplace transform of the kernel is 1/log p") {
    for (double p : {2.0, 3.0, 5.0}) {
        const double T = 26.0 / (p - 1.0);
        const double eps = 1e-7;
        const double head = volterra_nu(eps);   // e^{-pt} ~ 1 on [0,eps]
        const double body = oracle::integrate(
            [&](double u) {
                const double s = std::exp(u);
                return std::exp(-p * s) * volterra_mu(s, 0.0, -1.0) * s;
            },
            std::log(eps), std::log(T), 1e-10);
        const double tail = 1.2 * std::exp((1.0 - p) * T) / (p - 1.0);
        CHECK(std::abs(head + body - 1.0 / std::log(p)) <= tail + 1e-6);
    }
}

TEST_CASE("bessel K0") {
    CHECK(bessel_k0(1.0) == doctest::Approx(0.421024438240708333).epsilon(1e-12));
    // independent route: K0(x) = int_0^inf e^{-x cosh u} du
    for (double x : {3.0, 5.0, 10.0}) {
        const double umax = std::acosh(46.0 / x) + 1.0;
        const double ref = oracle::integrate(
            [&](double u) { return std::exp(-x * std::cosh(u)); }, 0.0, umax, 1e-14);
        CHECK(bessel_k0(x) == doctest::Approx(ref).epsilon(1e-10));
    }
    // asymptotic normalization at x = 30
    CHECK(bessel_k0(30.0) * std::sqrt(30.0) * std::exp(30.0)
          == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-3));
    // small-argument limit
    const double x = 1e-4;
    CHECK(std::abs(bessel_k0(x) + std::log(x / 2.0) + euler_gamma) < 1e-6);
    // seam continuity at the series/Chebyshev crossover
    CHECK(std::abs(bessel_k0(2.0 * (1 - 1e-13)) - bessel_k0(2.0 * (1 + 1e-13))) < 1e-10);
    CHECK_THROWS_AS(bessel_k0(0.0), DomainError);
}

TEST_CASE("sine and cosine integrals") {
    {
        const SiCi v = sici(1e-8);
        CHECK(v.si == doctest::Approx(-M_PI_2).epsilon(1e-8));
        CHECK(std::abs(v.ci - std::log(1e-8) - euler_gamma) < 1e-10);
    }
    CHECK(sici(1.0).si == doctest::Approx(-0.624713256427713604).epsilon(1e-12));
    CHECK(sici(1.0).ci == doctest::Approx(0.337403922900968135).epsilon(1e-12));
    CHECK(sici(10.0).si == doctest::Approx(0.0875512674239774301).epsilon(1e-11));
    CHECK(sici(10.0).ci == doctest::Approx(-0.0454564330044553726).epsilon(1e-11));
    // seam between the series and the continued fraction
    CHECK(std::abs(sici(4.0 * (1 - 1e-13)).ci - sici(4.0 * (1 + 1e-13)).ci) < 1e-12);
    CHECK(std::abs(sici(4.0 * (1 - 1e-13)).si - sici(4.0 * (1 + 1e-13)).si) < 1e-12);
    CHECK_THROWS_AS(sici(0.0), DomainError);

    // Laplace checks at p = 1
    const double T = 45.0;
    const cplx ci_int = oracle::integrate(
        [&](double t) { return cplx(std::exp(-t) * sici(std::max(t, 1e-300)).ci, 0.0); },
        1e-9, T, 1e-10);
    CHECK(ci_int.real() == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-6));
    const cplx si_int = oracle::integrate(
        [&](double t) { return cplx(std::exp(-t) * sici(std::max(t, 1e-300)).si, 0.0); },
        1e-9, T, 1e-10);
    CHECK(si_int.real() == doctest::Approx(std::atan(1.0) - M_PI_2).epsilon(1e-6));
}

TEST_CASE("branch-aware complex log") {
    CHECK(clog(cplx(1.0, 0.0)) == cplx(0.0, 0.0));
    CHECK(clog(cplx(0.0, 1.0)).imag() == doctest::Approx(M_PI_2));
    CHECK(clog(cplx(-2.0, 0.0), Side::above).imag() == doctest::Approx(M_PI));
    CHECK(clog(cplx(-2.0, 0.0), Side::below).imag() == doctest::Approx(-M_PI));
    CHECK(clog(cplx(-2.0, 0.0), Side::above).real() == doctest::Approx(std::log(2.0)));
    // side flags agree with the +-i eps limits
    for (double x : {-0.5, -2.0, -17.0}) {
        CHECK(std::abs(clog(cplx(x, 0.0), Side::above) - std::log(cplx(x, 1e-14))) < 1e-9);
        CHECK(std::abs(clog(cplx(x, 0.0), Side::below) - std::log(cplx(x, -1e-14))) < 1e-9);
        // off the cut the side flag is ignored
        CHECK(clog(cplx(-x, 0.3), Side::above) == clog(cplx(-x, 0.3), Side::below));
    }
    CHECK_THROWS_AS(clog(cplx(0.0, 0.0)), DomainError);
}
