#include "tdpi/specfun.hpp"
#include "tdpi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tdpi {

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw DomainError("gamma_fn: requires x > 0");
    return std::tgamma(x);
}

cplx clog(cplx p, Side side) {
    if (p == cplx(0.0, 0.0))
        throw DomainError("clog: branch point p = 0");
    if (p.imag() == 0.0 && p.real() < 0.0) {
        const double mag = std::log(-p.real());
        const double arg = (side == Side::below) ? -M_PI : M_PI;
        return {mag, arg};
    }
    return std::log(p);
}

// ---------------------------------------------------------------------------
// Volterra mu-function by direct quadrature of the defining s-integral.

namespace {

constexpr std::size_t kMuEvalCap = 200000;

struct MuIntegrand {
    double log_t, beta, delta, lg_beta;
    mutable std::size_t evals = 0;

    double log_value(double s) const {
        ++evals;
        return (delta + s) * log_t + beta * std::log(s) - lg_beta - std::lgamma(delta + s + 1.0);
    }
    double value(double s) const {
        if (s <= 0.0) {
            if (beta > 0.0) return 0.0;
            // beta = 0 limit: t^delta / Gamma(delta+1); zero for delta = -1.
            if (delta <= -1.0) return 0.0;
            ++evals;
            return std::exp(delta * log_t) / std::tgamma(delta + 1.0);
        }
        const double lv = log_value(s);
        return lv < -745.0 ? 0.0 : std::exp(lv);
    }
};

double simpson(const MuIntegrand& f, double a, double b, std::size_t n) {
    // n intervals (even)
    const double h = (b - a) / double(n);
    double acc = f.value(a) + f.value(b);
    for (std::size_t i = 1; i < n; ++i)
        acc += f.value(a + h * double(i)) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double adaptive_panel(const MuIntegrand& f, double a, double b, double rel_tol, double scale) {
    double prev = simpson(f, a, b, 8);
    for (std::size_t n = 16;; n *= 2) {
        const double cur = simpson(f, a, b, n);
        const double err = std::abs(cur - prev);
        if (err <= rel_tol * std::max(scale, std::abs(cur)) || cur == prev)
            return cur;
        if (f.evals > kMuEvalCap)
            throw QuadratureError("volterra_mu: quadrature did not converge",
                                  err / std::max(scale, std::abs(cur)));
        prev = cur;
    }
}

} // namespace

double volterra_mu(double t, double beta, double delta) {
    if (t < 0.0) throw DomainError("volterra_mu: requires t >= 0");
    if (beta < 0.0) throw DomainError("volterra_mu: requires beta >= 0");
    if (delta != -1.0 && delta != 0.0 && delta != 1.0)
        throw DomainError("volterra_mu: delta must be in {-1, 0, 1}");
    if (t == 0.0) {
        if (delta == -1.0)
            throw DomainError("volterra_mu: mu(0,beta,-1) diverges");
        return 0.0;
    }

    MuIntegrand f{std::log(t), beta, delta, std::lgamma(beta + 1.0)};

    // Bracket and locate the integrand's mode by golden-section on log f.
    double hi = 1.0;
    while (f.log_value(hi * 2.0) > f.log_value(hi) && hi < 1e6) hi *= 2.0;
    double lo = 1e-8, a = lo, b = hi * 2.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 80 && (b - a) > 1e-6 * (1.0 + b); ++it) {
        if (f.log_value(c) < f.log_value(d)) a = c; else b = d;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    const double mode = 0.5 * (a + b);
    const double peak = f.log_value(mode);

    // Right endpoint: integrand below e^{-46} * peak.
    double s_max = std::max(2.0 * mode, 4.0);
    while (f.log_value(s_max) > peak - 46.0 && s_max < 1e7) s_max *= 1.5;

    const double scale = std::exp(std::max(peak, -700.0)) * std::max(mode, 1.0);
    const double left = adaptive_panel(f, 0.0, mode, 1e-11, scale);
    const double right = adaptive_panel(f, mode, s_max, 1e-11, scale);
    return left + right;
}

// ---------------------------------------------------------------------------
// nu(t) through the Laplace branch-cut representation. The integrands below
// are smooth in u = log s; both tails are handled analytically.

namespace {

// (1 - e^{-x})/x, stable for all x >= 0
double phi1(double x) {
    if (x < 1e-8) return 1.0 - 0.5 * x + x * x / 6.0;
    return -std::expm1(-x) / x;
}

// 1 - (1 - e^{-x})/x = sum_{k>=1} (-1)^{k+1} x^k/(k+1)!
double one_minus_phi1(double x) {
    if (x > 0.5) return 1.0 - phi1(x);
    double term = 0.5 * x, acc = term;
    for (int k = 2; k < 24; ++k) {
        term *= -x / double(k + 1);
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
}

constexpr double kUHi = 50.0;
constexpr double kULo = -60.0;
constexpr std::size_t kUNodes = 22001;    // odd, Simpson

struct BranchGrid {
    std::vector<double> u, w, eu;   // nodes, Simpson*cauchy weights, e^u
    double tail;                    // int_{U}^inf du/(u^2+pi^2)
    BranchGrid() {
        u.resize(kUNodes);
        w.resize(kUNodes);
        eu.resize(kUNodes);
        const double du = (kUHi - kULo) / double(kUNodes - 1);
        for (std::size_t i = 0; i < kUNodes; ++i) {
            u[i] = kULo + du * double(i);
            double simp = (i == 0 || i + 1 == kUNodes) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            w[i] = simp * (du / 3.0) / (u[i] * u[i] + M_PI * M_PI);
            eu[i] = std::exp(u[i]);
        }
        tail = 0.5 - std::atan(kUHi / M_PI) / M_PI;
    }
};

const BranchGrid& branch_grid() {
    static const BranchGrid g;
    return g;
}

} // namespace

NuRemainder volterra_nu_remainder(double t) {
    if (t < 0.0) throw DomainError("volterra_nu_remainder: requires t >= 0");
    if (t == 0.0) return {0.0, 0.0};
    const BranchGrid& g = branch_grid();
    double nb = 0.0, cb = 0.0;
    for (std::size_t i = 0; i < kUNodes; ++i) {
        const double x = t * g.eu[i];
        nb += g.w[i] * (x > 40.0 ? 1.0 : -std::expm1(-x));
        cb += g.w[i] * one_minus_phi1(x);
    }
    return {nb + g.tail, t * (cb + g.tail)};
}

double volterra_nu(double t) {
    return std::expm1(t) + volterra_nu_remainder(t).nu_b;
}

NuTable nu_table(double step, std::size_t count) {
    if (!(step > 0.0) || count == 0)
        throw DomainError("nu_table: requires step > 0 and count > 0");
    if (step * double(count) > 50.0)
        throw DomainError("nu_table: step*count > 50 would overflow nu(t) ~ e^t");

    const BranchGrid& g = branch_grid();
    NuTable tab;
    tab.step = step;
    tab.values.assign(count + 1, 0.0);
    tab.cumulative.assign(count + 1, 0.0);

    // e^{-t_j e^u} = (e^{-step e^u})^j : march the factor instead of
    // re-exponentiating per entry.
    std::vector<double> fac(kUNodes), cur(kUNodes, 1.0);
    for (std::size_t i = 0; i < kUNodes; ++i)
        fac[i] = (step * g.eu[i] > 745.0) ? 0.0 : std::exp(-step * g.eu[i]);
    for (std::size_t j = 1; j <= count; ++j) {
        const double t = step * double(j);
        double nb = 0.0, cb = 0.0;
        for (std::size_t i = 0; i < kUNodes; ++i) {
            cur[i] *= fac[i];
            const double x = t * g.eu[i];
            if (x < 1e-7) {
                nb += g.w[i] * x * (1.0 - 0.5 * x);
                cb += g.w[i] * 0.5 * x * (1.0 - x / 3.0);
            } else {
                const double one_m_e = 1.0 - cur[i];
                nb += g.w[i] * one_m_e;
                cb += g.w[i] * (1.0 - one_m_e / x);
            }
        }
        tab.values[j] = std::expm1(t) + nb + g.tail;
        tab.cumulative[j] = std::expm1(t) - t + t * (cb + g.tail);
    }
    return tab;
}

// ---------------------------------------------------------------------------
// Modified Bessel K0. Small arguments: classical log series. Large
// arguments: SLATEC FNLIB Chebyshev data for the exponentially scaled
// function (Fullerton, LANL; public domain tables).

namespace {

const double ak0cs[18] = {
    -0.07643947903327941424082978270088,
    -0.02235652605699819052023095550791,
    7.734181154693858235300618174047e-4,
    -4.281006688886099464452146435416e-5,
    3.08170017386297474365001482666e-6,
    -2.639367222009664974067448892723e-7,
    2.563713036403469206294088265742e-8,
    -2.742705549900201263857211915244e-9,
    3.169429658097499592080832873403e-10,
    -3.902353286962184141601065717962e-11,
    5.068040698188575402050092127286e-12,
    -6.889574741007870679541713557984e-13,
    9.744978497825917691388201336831e-14,
    -1.427332841884548505389855340122e-14,
    2.156412571021463039558062976527e-15,
    -3.34965425514956277218878205853e-16,
    5.335260216952911692145280392601e-17,
    -8.693669980890753807639622378837e-18,
};
const double ak02cs[14] = {
    -0.01201869826307592239839346212452,
    -0.009174852691025695310652561075713,
    1.444550931775005821048843878057e-4,
    -4.013614175435709728671021077879e-6,
    1.567831810852310672590348990333e-7,
    -7.77011043852173771031579975446e-9,
    4.611182576179717882533130529586e-10,
    -3.158592997860565770526665803309e-11,
    2.435018039365041127835887814329e-12,
    -2.074331387398347897709853373506e-13,
    1.925787280589917084742736504693e-14,
    -1.927554805838956103600347182218e-15,
    2.062198029197818278285237869644e-16,
    -2.341685117579242402603640195071e-17,
};

double csevl(double x, const double* cs, int n) {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    const double twox = 2.0 * x;
    for (int i = n - 1; i >= 0; --i) {
        b2 = b1;
        b1 = b0;
        b0 = twox * b1 - b2 + cs[i];
    }
    return 0.5 * (b0 - b2);
}

double bessel_i0_small(double x) {
    // power series, adequate for x <= 2
    const double q = 0.25 * x * x;
    double term = 1.0, acc = 1.0;
    for (int k = 1; k < 30; ++k) {
        term *= q / double(k * k);
        acc += term;
        if (term < 1e-17 * acc) break;
    }
    return acc;
}

} // namespace

double bessel_k0(double x) {
    if (!(x > 0.0))
        throw DomainError("bessel_k0: requires x > 0");
    if (x <= 2.0) {
        const double q = 0.25 * x * x;
        double term = 1.0, hk = 0.0, acc = 0.0;
        for (int k = 1; k < 30; ++k) {
            term *= q / double(k * k);
            hk += 1.0 / double(k);
            acc += term * hk;
            if (term * hk < 1e-17 * std::max(acc, 1.0)) break;
        }
        return -(std::log(0.5 * x) + euler_gamma) * bessel_i0_small(x) + acc;
    }
    const double scaled = (x <= 8.0)
        ? csevl((16.0 / x - 5.0) / 3.0, ak0cs, 18) + 1.25
        : csevl(16.0 / x - 1.0, ak02cs, 14) + 1.25;
    return std::exp(-x) * scaled / std::sqrt(x);
}

// ---------------------------------------------------------------------------
// Sine/cosine integrals. Power series up to x = 4, then the continued
// fraction for E1(ix) evaluated by the modified Lentz algorithm:
// E1(ix) = -ci(x) + i si(x).

namespace {

SiCi sici_series(double x) {
    const double x2 = x * x;
    // Si(x) = sum (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
    double term = x, si = x;
    for (int k = 1; k < 40; ++k) {
        term *= -x2 / double((2 * k) * (2 * k + 1));
        si += term / double(2 * k + 1);
        if (std::abs(term) < 1e-18 * std::abs(si)) break;
    }
    // Cin(x) = sum (-1)^{k+1} x^{2k} / ((2k)(2k)!)
    double t2 = -1.0, cin = 0.0;
    for (int k = 1; k < 40; ++k) {
        t2 *= -x2 / double((2 * k - 1) * (2 * k));
        cin += t2 / double(2 * k);
        if (std::abs(t2) < 1e-18 * std::max(std::abs(cin), 1.0)) break;
    }
    return {si - M_PI_2, euler_gamma + std::log(x) - cin};
}

cplx e1_continued_fraction(cplx z) {
    // E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...))))
    const double tiny = 1e-290;
    cplx b = z + 1.0;
    cplx C = b, D = 0.0, f = b;
    if (std::abs(C) < tiny) C = tiny;
    f = C;
    for (int k = 1; k < 400; ++k) {
        const cplx a = -double(k) * double(k);
        b = z + double(2 * k + 1);
        D = b + a * D;
        if (std::abs(D) < tiny) D = tiny;
        C = b + a / C;
        if (std::abs(C) < tiny) C = tiny;
        D = 1.0 / D;
        const cplx delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-z) / f;
}

} // namespace

SiCi sici(double x) {
    if (!(x > 0.0))
        throw DomainError("sici: requires x > 0");
    if (x <= 4.0)
        return sici_series(x);
    const cplx e1 = e1_continued_fraction(cplx(0.0, x));
    return {e1.imag(), -e1.real()};
}

} // namespace tdpi
