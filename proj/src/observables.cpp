#include "tdpi/observables.hpp"
#include "tdpi/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tdpi {

cplx z1(double t, const SpectralConstants& sc) {
    if (!(t > 0.0))
        throw DomainError("z1: requires t > 0");
    const double x = sc.abs_lambda() * t;
    const SiCi v = sici(x);
    // 1 - i x e^{ix} E1(ix),  E1(ix) = -ci + i si
    return 1.0 + x * std::exp(cplx(0.0, x)) * cplx(v.si, v.ci);
}

namespace {

// int_a^b (gamma + log s) (s-a)^r ds for r = 0,1,2 (a >= 0)
struct LogMoments {
    double m0, m1, m2;
};

double int_pow_log(double s, int m) {
    // antiderivative of s^m log s
    if (s == 0.0) return 0.0;
    const double p = std::pow(s, m + 1);
    return p * (std::log(s) / double(m + 1) - 1.0 / double((m + 1) * (m + 1)));
}

LogMoments log_moments(double a, double b) {
    auto ints = [&](int m) {  // int_a^b s^m log s ds
        return int_pow_log(b, m) - int_pow_log(a, m);
    };
    auto intp = [&](int m) {  // int_a^b s^m ds
        return (std::pow(b, m + 1) - std::pow(a, m + 1)) / double(m + 1);
    };
    const double g = euler_gamma;
    LogMoments lm;
    lm.m0 = g * intp(0) + ints(0);
    lm.m1 = (g * intp(1) + ints(1)) - a * lm.m0;
    const double s2 = g * intp(2) + ints(2);
    const double s1 = g * intp(1) + ints(1);
    lm.m2 = s2 - 2.0 * a * s1 + a * a * lm.m0;
    return lm;
}

// quadratic through values (f_prev, f0, f1) at xi = -1, 0, 1; integrated
// against moments (I0, I1, I2) in xi over [0,1]-scaled panel
cplx quad_panel(cplx f_prev, cplx f0, cplx f1, double I0, double I1, double I2) {
    const cplx d1 = 0.5 * (f1 - f_prev);
    const cplx d2 = 0.5 * (f1 - 2.0 * f0 + f_prev);
    return f0 * I0 + d1 * I1 + d2 * I2;
}

} // namespace

std::vector<cplx> z_interaction(const std::vector<double>& t_eval,
                                const ChargeGrid& cg, const SpectralConstants& sc) {
    const double h = cg.step;
    const std::size_t n = cg.q.size() - 1;

    // w(s) = r(s) / 4pi, the bounded part of (U(s) phi)(0)
    std::vector<cplx> w(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        w[i] = forcing_remainder(h * double(i), sc) / (4.0 * M_PI);

    std::vector<cplx> out(t_eval.size());
    const double cfac = sc.c_alpha / (4.0 * M_PI);

    // lag-only panel moments of (gamma + log s), xi-scaled
    std::size_t max_j = 0;
    for (double te : t_eval)
        max_j = std::max(max_j, std::size_t(std::llround(te / h)));
    max_j = std::min(max_j, n);
    std::vector<double> L0v(max_j), L1v(max_j), L2v(max_j);
    for (std::size_t k = 0; k < max_j; ++k) {
        const LogMoments lm = log_moments(h * double(k), h * double(k + 1));
        L0v[k] = lm.m0;
        L1v[k] = lm.m1 / h;
        L2v[k] = lm.m2 / (h * h);
    }

    for (std::size_t e = 0; e < t_eval.size(); ++e) {
        const double te = t_eval[e];
        const auto j = std::size_t(std::llround(te / h));
        if (j > n || std::abs(te - h * double(j)) > 1e-9 * std::max(1.0, te))
            throw GridError("z_interaction: evaluation time off the charge grid");
        if (j == 0) {
            out[e] = 0.0;
            continue;
        }
        // s = te - tau; Q_i = q(te - i h)
        auto Q = [&](std::size_t i) { return cg.q[j - i]; };
        cplx acc_log = 0.0, acc_w = 0.0;
        for (std::size_t k = 0; k < j; ++k) {
            const double L0 = L0v[k], L1 = L1v[k], L2 = L2v[k];
            if (k == 0 && j >= 2) {
                // forward stencil at the singular end: nodes xi = 0,1,2
                const cplx f0 = Q(0), f1 = Q(1), f2 = Q(2);
                acc_log += f0 * L0 + 0.5 * (-3.0 * f0 + 4.0 * f1 - f2) * L1
                         + 0.5 * (f0 - 2.0 * f1 + f2) * L2;
                const cplx g0 = f0 * w[0], g1v = f1 * w[1], g2 = f2 * w[2];
                acc_w += g0 * h + 0.5 * (-3.0 * g0 + 4.0 * g1v - g2) * (h / 2.0)
                       + 0.5 * (g0 - 2.0 * g1v + g2) * (h / 3.0);
            } else if (k == 0 || j == 1) {
                // single linear panel
                const cplx f0 = Q(k), f1 = Q(k + 1);
                acc_log += f0 * (L0 - L1) + f1 * L1;
                const cplx g0 = f0 * w[k], g1v = f1 * w[k + 1];
                acc_w += g0 * (h - h / 2.0) + g1v * (h / 2.0);
            } else {
                // centered stencil on interior panels: nodes xi = -1,0,1
                acc_log += quad_panel(Q(k - 1), Q(k), Q(k + 1), L0, L1, L2);
                acc_w += quad_panel(Q(k - 1) * w[k - 1], Q(k) * w[k],
                                    Q(k + 1) * w[k + 1], h, h / 2.0, h / 3.0);
            }
        }
        out[e] = cplx(0.0, 1.0) * (-cfac * acc_log + acc_w);
    }
    return out;
}

SurvivalSeries survival_series(const ChargeGrid& cg, std::size_t stride) {
    if (stride == 0) stride = 1;
    SurvivalSeries s;
    const std::size_t n = cg.q.size() - 1;
    for (std::size_t j = 0; j <= n; j += stride)
        s.times.push_back(cg.time(j));
    s.z = z_interaction(s.times, cg, cg.sc);
    s.z1.resize(s.times.size());
    s.theta.resize(s.times.size());
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        s.z1[i] = (s.times[i] == 0.0) ? cplx(1.0) : z1(s.times[i], cg.sc);
        s.theta[i] = s.z1[i] + s.z[i];
    }
    return s;
}

namespace {

// int_0^h e^{i u sigma} (1 - sigma/h) dsigma and int e^{i u sigma} sigma/h
void osc_panel_weights(double u, double h, cplx& wl, cplx& wr) {
    const double x = u * h;
    if (std::abs(x) < 1e-4) {
        // series in x keeps the small-phase case stable
        const cplx ix(0.0, x);
        wl = h * (0.5 + ix / 6.0 - x * x / 48.0);
        wr = h * (0.5 + ix / 3.0 - x * x / 8.0 - ix * x * x / 30.0);
        return;
    }
    const cplx e = std::exp(cplx(0.0, x));
    const cplx iu(0.0, u);
    const cplx i1 = (e - 1.0) / iu;              // int e^{iu s}
    const cplx i2 = (h * e - i1) / iu;           // int s e^{iu s}
    wr = i2 / h;
    wl = i1 - wr;
}

} // namespace

double mass(double t, const ChargeGrid& cg, const SpectralConstants& sc,
            double k_max, std::size_t nk) {
    const double h = cg.step;
    const auto j = std::size_t(std::llround(t / h));
    if (j >= cg.q.size() || std::abs(t - h * double(j)) > 1e-9 * std::max(1.0, t))
        throw GridError("mass: t off the charge grid");

    // g = qdot - i q by centered differences
    const std::size_t n = j;
    std::vector<cplx> g(n + 1);
    auto qdot = [&](std::size_t m) -> cplx {
        if (cg.q.size() < 3) throw GridError("mass: grid too short");
        if (m == 0) return (-3.0 * cg.q[0] + 4.0 * cg.q[1] - cg.q[2]) / (2.0 * h);
        if (m == cg.q.size() - 1)
            return (3.0 * cg.q[m] - 4.0 * cg.q[m - 1] + cg.q[m - 2]) / (2.0 * h);
        return (cg.q[m + 1] - cg.q[m - 1]) / (2.0 * h);
    };
    for (std::size_t m = 0; m <= n; ++m)
        g[m] = qdot(m) - cplx(0.0, 1.0) * cg.q[m];

    const double U = k_max * k_max;
    if (nk == 0) {
        const double per = 20.0 * U * std::max(t, 0.3) / (2.0 * M_PI);
        nk = std::max<std::size_t>(20001, std::size_t(per) | 1);
    }
    if (nk % 2 == 0) ++nk;

    const double lam = sc.abs_lambda();
    const cplx q_t = cg.q[j], q_0 = cg.q[0];

    // |psi_hat|^2 integrated in u = k^2; Simpson on [0, U]
    const double du = U / double(nk - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < nk; ++i) {
        const double u = du * double(i);
        // J(t,k) = e^{-iut} int_0^t e^{iu tau} g(tau) dtau, panel-exact
        cplx wl, wr;
        osc_panel_weights(u, h, wl, wr);
        const cplx ph = std::exp(cplx(0.0, u * h));
        cplx phase = 1.0, S = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            S += phase * (g[m] * wl + g[m + 1] * wr);
            phase *= ph;
        }
        const cplx em = std::exp(cplx(0.0, -u * t));
        const cplx J = em * S;
        const double g1 = 1.0 / (2.0 * M_PI * (u + 1.0));
        const double phat = sc.c_alpha / (2.0 * M_PI * (u + lam));
        const cplx psi = q_t * g1 + em * (phat - q_0 * g1) - g1 * J;
        const double v = std::norm(psi);
        const double simp = (i == 0 || i + 1 == nk) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += simp * v;
    }
    double M2 = M_PI * acc * du / 3.0;    // 2pi int k dk = pi int du

    // analytic tail above U: the q(t) and bound-state pieces dominate
    const double A = std::abs(q_t);
    const double C = sc.c_alpha, q0a = std::abs(q_0);
    const double cross = (std::abs(lam - 1.0) > 1e-14)
        ? std::log((U + lam) / (U + 1.0)) / (lam - 1.0)
        : 1.0 / (U + 1.0);
    M2 += (1.0 / (4.0 * M_PI)) * (A * A / (U + 1.0)
        + C * C / (U + lam) + q0a * q0a / (U + 1.0) - 2.0 * C * q0a * cross);

    // neglected-content estimate; J ~ O(1/u) with envelope |g(t)| + |g(0)|
    const double Gv = std::abs(g[n]) + std::abs(g[0]);
    const double tail_est = (1.0 / (4.0 * M_PI)) *
        (2.0 * A * Gv / (U * U) + Gv * Gv / (3.0 * U * U * U)
         + 2.0 * A * C / (U * U * std::max(t, 1.0)));
    if (tail_est > 1e-4)
        throw AccuracyError("mass: k_max too small for the requested accuracy", tail_est);

    return std::sqrt(M2);
}

DecayFit decay_fit(const SurvivalSeries& series, double t_min, double t_max) {
    if (series.times.empty())
        throw GridError("decay_fit: empty series");
    if (!(t_min > 0.0) || !(t_max > t_min))
        throw DomainError("decay_fit: bad window");
    if (t_max < 10.0 * t_min)
        throw DomainError("decay_fit: window shorter than one decade");
    if (t_max > series.times.back() + 1e-9)
        throw DomainError("decay_fit: window exceeds the computed series");

    const double lam = std::exp(2.0 * (std::log(2.0) - euler_gamma));
    const double period = 2.0 * M_PI / lam;

    // sampling must resolve the oscillation
    double dt_avg = (series.times.back() - series.times.front())
                  / double(series.times.size() - 1);
    if (dt_avg > period / 20.0)
        throw GridError("decay_fit: series does not resolve the phase oscillation");

    // block maxima of |Theta| over windows of one period
    std::vector<double> bt, bv;
    double block_end = t_min + period;
    double cur_max = -1.0, cur_arg = 0.0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t < t_min || t > t_max) continue;
        if (t > block_end) {
            if (cur_max > 0.0) { bt.push_back(cur_arg); bv.push_back(cur_max); }
            cur_max = -1.0;
            while (block_end < t) block_end += period;
        }
        const double v = std::abs(series.theta[i]);
        if (v > cur_max) { cur_max = v; cur_arg = t; }
    }
    if (cur_max > 0.0) { bt.push_back(cur_arg); bv.push_back(cur_max); }
    if (bt.size() < 2)
        throw GridError("decay_fit: empty envelope");

    // least squares on log-log
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double N = double(bt.size());
    for (std::size_t i = 0; i < bt.size(); ++i) {
        const double x = std::log(bt[i]), y = std::log(std::max(bv[i], 1e-300));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double det = N * sxx - sx * sx;
    DecayFit fit;
    fit.exponent = (det != 0.0) ? (N * sxy - sx * sy) / det : 0.0;
    const double intercept = (sy - fit.exponent * sx) / N;
    fit.amplitude = std::exp(intercept);
    fit.t_min = t_min;
    fit.t_max = t_max;
    double rss = 0.0;
    for (std::size_t i = 0; i < bt.size(); ++i) {
        const double pred = intercept + fit.exponent * std::log(bt[i]);
        const double dlt = std::log(std::max(bv[i], 1e-300)) - pred;
        rss += dlt * dlt;
    }
    fit.residual = std::sqrt(rss / N);
    return fit;
}

} // namespace tdpi
