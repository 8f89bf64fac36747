#include "tdpi/charge.hpp"
#include "tdpi/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace tdpi {

KernelWeights kernel_weights(double h, std::size_t n, const NuTable& nu) {
    if (!(h > 0.0) || n == 0)
        throw DomainError("kernel_weights: requires h > 0, n > 0");
    if (std::abs(nu.step - h) > 1e-12 * h)
        throw GridError("kernel_weights: table step does not match h");
    if (nu.values.size() < n + 1)
        throw GridError("kernel_weights: table does not cover [0, n*h]");
    KernelWeights kw;
    kw.step = h;
    kw.w0.resize(n);
    kw.w1.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double a = h * double(m), b = h * double(m + 1);
        kw.w0[m] = nu.values[m + 1] - nu.values[m];
        kw.w1[m] = (b * nu.values[m + 1] - a * nu.values[m])
                 - (nu.cumulative[m + 1] - nu.cumulative[m]);
    }
    return kw;
}

namespace {

// Tables of the bounded kernel remainder nu_b and its antiderivative on a
// uniform lattice, built with the marching-factor recursion of nu_table.
struct RemainderTable {
    double step = 0.0;
    std::vector<double> nu_b, cum_b;
};

RemainderTable remainder_table(double step, std::size_t count) {
    RemainderTable tab;
    tab.step = step;
    tab.nu_b.assign(count + 1, 0.0);
    tab.cum_b.assign(count + 1, 0.0);
    for (std::size_t j = 1; j <= count; ++j) {
        const NuRemainder r = volterra_nu_remainder(step * double(j));
        tab.nu_b[j] = r.nu_b;
        tab.cum_b[j] = r.cum_nu_b;
    }
    return tab;
}

// 6-point Lagrange interpolation on a uniform table at fractional index x.
double lagrange6(const std::vector<double>& tab, double x) {
    long base = long(std::floor(x)) - 2;
    base = std::max(0L, std::min(base, long(tab.size()) - 6));
    double acc = 0.0;
    for (int i = 0; i < 6; ++i) {
        double li = 1.0;
        for (int k = 0; k < 6; ++k)
            if (k != i) li *= (x - double(base + k)) / double(i - k);
        acc += li * tab[std::size_t(base + i)];
    }
    return acc;
}

struct KernelEval {
    // exact fine-lattice tables on [0, window], coarse tables on [0, T]
    RemainderTable fine, coarse;
    std::size_t refine = 1;       // coarse step = refine * fine step

    // nu_b and cum_b at lag = u * fine.step
    void at(std::size_t u, double& nb, double& cb) const {
        if (u < fine.nu_b.size()) {
            nb = fine.nu_b[u];
            cb = fine.cum_b[u];
            return;
        }
        if (u % refine == 0) {
            const std::size_t j = u / refine;
            nb = coarse.nu_b[j];
            cb = coarse.cum_b[j];
            return;
        }
        const double x = double(u) / double(refine);
        nb = lagrange6(coarse.nu_b, x);
        cb = lagrange6(coarse.cum_b, x);
    }
};

// Exponential-kernel moments over [0, d]: int e^s ds, int s e^s ds.
struct ExpMoments {
    double e0, e1, growth;
    explicit ExpMoments(double d)
        : e0(std::expm1(d)), e1((d - 1.0) * std::exp(d) + 1.0), growth(std::exp(d)) {}
};

// dot product sum_p m[p] * w[j-1-p] split across a helper thread; the
// marching recursion stays sequential, only the inner reduction is shared.
class ConvWorker {
public:
    ConvWorker() : th_([this] { loop(); }) {}
    ~ConvWorker() {
        job_.store(-1, std::memory_order_release);
        job_.notify_one();
        th_.join();
    }
    // computes sum_{p=lo..hi-1} m[p] * w[off - p]
    cplx dot(const cplx* m, const double* w, std::size_t lo, std::size_t hi,
             std::size_t off) {
        const std::size_t len = hi - lo;
        if (len < 4096) return partial(m, w, lo, hi, off);
        const std::size_t mid = lo + len / 2;
        m_ = m; w_ = w; lo_ = lo; hi_ = mid; off_ = off;
        job_.store(1, std::memory_order_release);
        job_.notify_one();
        const cplx mine = partial(m, w, mid, hi, off);
        while (job_.load(std::memory_order_acquire) != 0) {}
        return mine + result_;
    }

private:
    static cplx partial(const cplx* m, const double* w, std::size_t lo,
                        std::size_t hi, std::size_t off) {
        double re = 0.0, im = 0.0;
        for (std::size_t p = lo; p < hi; ++p) {
            const double c = w[off - p];
            re += c * m[p].real();
            im += c * m[p].imag();
        }
        return {re, im};
    }
    void loop() {
        for (;;) {
            job_.wait(0, std::memory_order_acquire);
            const int j = job_.load(std::memory_order_acquire);
            if (j < 0) return;
            result_ = partial(m_, w_, lo_, hi_, off_);
            job_.store(0, std::memory_order_release);
            job_.notify_one();
        }
    }
    const cplx* m_ = nullptr;
    const double* w_ = nullptr;
    std::size_t lo_ = 0, hi_ = 0, off_ = 0;
    cplx result_;
    std::atomic<int> job_{0};
    std::thread th_;
};

} // namespace

ChargeGrid solve_charge(const PhysicalParams& params, const SpectralConstants& sc,
                        double T, double h, const ChargeOptions& opts) {
    if (!(h > 0.0) || !(T > 0.0))
        throw DomainError("solve_charge: requires T > 0, h > 0");
    if (h > 0.02)
        throw DomainError("solve_charge: step too large (h must be <= 0.02)");

    // T not a multiple of h is snapped down to the grid.
    const std::size_t n = std::size_t(std::floor(T / h + 1e-9));
    if (n == 0)
        throw DomainError("solve_charge: T < h");

    const std::size_t R = std::max<std::size_t>(1, opts.startup_refine);
    const std::size_t K = (R > 1) ? std::min<std::size_t>(opts.startup_panels, n) : 0;
    const std::size_t F = (R > 1) ? K * R : 0;       // fine nodes before t_c
    const double hf = h / double(R);

    // node times in fine-lattice units (all multiples of hf)
    const std::size_t M = (R > 1) ? F + (n - K) : n; // number of panels
    std::vector<std::size_t> uidx(M + 1);
    for (std::size_t i = 0; i <= M; ++i)
        uidx[i] = (R > 1 && i <= F) ? i : (K + (i - F)) * R;
    auto node_time = [&](std::size_t i) { return hf * double(uidx[i]); };

    KernelEval kernel;
    kernel.refine = R;
    kernel.coarse = remainder_table(h, n);
    if (R > 1) {
        const double window = std::min(T, std::max(4.0 * double(K) * h, 0.25));
        kernel.fine = remainder_table(hf, std::size_t(std::ceil(window / hf)) + 2);
    }

    // uniform coarse-lag weights for the bulk convolution
    std::vector<double> left_w(n, 0.0), right_w(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = h * double(k);
        const double w0 = kernel.coarse.nu_b[k + 1] - kernel.coarse.nu_b[k];
        const double w1 = (h * double(k + 1)) * kernel.coarse.nu_b[k + 1]
                        - a * kernel.coarse.nu_b[k]
                        - (kernel.coarse.cum_b[k + 1] - kernel.coarse.cum_b[k]);
        left_w[k] = (w1 - a * w0) / h;           // earlier-time sample
        right_w[k] = w0 - left_w[k];             // later-time sample
    }
    // folded weight: sample m_p sees left_w at its panel and right_w from the next
    std::vector<double> conv_w(n > 1 ? n - 1 : 0);
    for (std::size_t k = 0; k + 1 < n; ++k)
        conv_w[k] = left_w[k] + right_w[k + 1];
    ConvWorker worker;

    auto zeta_at = [&](double t) {
        return opts.alpha_fn ? zeta_of_alpha(opts.alpha_fn(t)) : zeta(t, params);
    };
    auto remainder_at = [&](double t) {
        return opts.forcing_remainder_fn ? opts.forcing_remainder_fn(t)
                                         : forcing_remainder(t, sc);
    };
    const cplx q0 = opts.forcing_remainder_fn ? opts.q0 : cplx(sc.c_alpha);

    std::vector<cplx> m(M + 1), qn(M + 1), zt(M + 1), rv(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
        const double t = node_time(i);
        zt[i] = zeta_at(t);
        rv[i] = remainder_at(t);
    }
    qn[0] = q0;
    m[0] = zt[0] * qn[0] - rv[0];

    cplx E = 0.0;
    for (std::size_t i = 1; i <= M; ++i) {
        const double d = node_time(i) - node_time(i - 1);
        const ExpMoments em(d);
        // exponential channel: current panel, linear in m
        cplx Ek = em.growth * E + m[i - 1] * (em.e1 / d);
        const double dE = em.e0 - em.e1 / d;

        // bounded channel
        cplx Bk = 0.0;
        double dB = 0.0;
        const std::size_t U = uidx[i];
        if (R > 1 && i <= F + 1) {
            // startup region (plus first coarse step): generic panel loop
            for (std::size_t p = 0; p + 1 <= i; ++p) {
                double nb_b, cb_b, nb_a, cb_a;
                kernel.at(U - uidx[p], nb_b, cb_b);
                kernel.at(U - uidx[p + 1], nb_a, cb_a);
                const double a = hf * double(U - uidx[p + 1]);
                const double b = hf * double(U - uidx[p]);
                const double w0 = nb_b - nb_a;
                const double loc1 = (b * nb_b - a * nb_a - (cb_b - cb_a) - a * w0) / (b - a);
                if (p + 1 == i) {
                    Bk += m[p] * loc1;
                    dB = w0 - loc1;
                } else {
                    Bk += m[p] * loc1 + m[p + 1] * (w0 - loc1);
                }
            }
        } else {
            // fine region contribution with lag-interpolated moments
            for (std::size_t p = 0; p < F; ++p) {
                double nb_b, cb_b, nb_a, cb_a;
                kernel.at(U - uidx[p], nb_b, cb_b);
                kernel.at(U - uidx[p + 1], nb_a, cb_a);
                const double a = hf * double(U - uidx[p + 1]);
                const double b = hf * double(U - uidx[p]);
                const double w0 = nb_b - nb_a;
                const double loc1 = (b * nb_b - a * nb_a - (cb_b - cb_a) - a * w0) / (b - a);
                Bk += m[p] * loc1 + m[p + 1] * (w0 - loc1);
            }
            // uniform coarse panels (lag index k = coarse distance - 1)
            const std::size_t first = (R > 1) ? F : 0;
            const cplx* mc = m.data() + first;
            const std::size_t nc = i - first;          // coarse panels count
            Bk += mc[0] * left_w[nc - 1];
            if (nc > 1)
                Bk += worker.dot(mc, conv_w.data(), 1, nc, nc - 1);
            dB = right_w[0];
        }

        const cplx rhs = q0 - Ek - Bk + (dE + dB) * rv[i];
        qn[i] = rhs / (1.0 + (dE + dB) * zt[i]);
        m[i] = zt[i] * qn[i] - rv[i];
        E = Ek + dE * m[i];
        if (!std::isfinite(qn[i].real()) || !std::isfinite(qn[i].imag()))
            throw ConvergenceError("solve_charge: non-finite charge at t = "
                                   + std::to_string(node_time(i)));
    }

    ChargeGrid grid;
    grid.params = params;
    grid.sc = sc;
    grid.step = h;
    grid.q.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        grid.q[j] = (R > 1 && j <= K) ? qn[j * R] : qn[(R > 1) ? F + (j - K) : j];
    return grid;
}

ChargeGrid solve_picard(const PhysicalParams& params, const SpectralConstants& sc,
                        double T, double h, std::size_t iterations) {
    if (!(h > 0.0) || !(T > 0.0))
        throw DomainError("solve_picard: requires T > 0, h > 0");
    const std::size_t n = std::size_t(std::floor(T / h + 1e-9));
    if (n == 0)
        throw DomainError("solve_picard: T < h");

    const NuTable nu = nu_table(h, n);
    double zeta_T = 0.0;
    for (std::size_t j = 0; j <= n; ++j)
        zeta_T = std::max(zeta_T, std::abs(zeta(h * double(j), params)));
    const double nuT = nu.values.back();
    if (zeta_T * nuT >= 1.0)
        throw ConvergenceError("solve_picard: contraction bound violated, "
                               "zeta_T * nu(T) = " + std::to_string(zeta_T * nuT),
                               zeta_T * nuT);

    std::vector<double> times(n + 1);
    for (std::size_t j = 0; j <= n; ++j) times[j] = h * double(j);
    const std::vector<cplx> f = forcing_f(times, sc, nu);
    const KernelWeights kw = kernel_weights(h, n, nu);

    std::vector<cplx> ztv(n + 1);
    for (std::size_t j = 0; j <= n; ++j) ztv[j] = zeta(times[j], params);

    std::vector<cplx> q = f, next(n + 1);
    for (std::size_t it = 0; it < iterations; ++it) {
        double inc = 0.0;
        next[0] = f[0];
        for (std::size_t j = 1; j <= n; ++j) {
            cplx acc = 0.0;
            for (std::size_t p = 0; p < j; ++p) {
                const std::size_t k = j - 1 - p;
                const double a = h * double(k);
                const double loc1 = (kw.w1[k] - a * kw.w0[k]) / h;
                acc += (ztv[p] * q[p]) * loc1 + (ztv[p + 1] * q[p + 1]) * (kw.w0[k] - loc1);
            }
            next[j] = f[j] - acc;
        }
        for (std::size_t j = 0; j <= n; ++j)
            inc = std::max(inc, std::abs(next[j] - q[j]));
        q.swap(next);
        if (inc < 1e-10) break;
        if (it + 1 == iterations && inc >= 1e-10 && iterations > 4)
            throw ConvergenceError("solve_picard: iteration cap reached", inc);
    }

    ChargeGrid grid;
    grid.params = params;
    grid.sc = sc;
    grid.step = h;
    grid.q = std::move(q);
    return grid;
}

} // namespace tdpi
