#include "tdpi/model.hpp"
#include "tdpi/errors.hpp"

#include <cmath>

namespace tdpi {

SpectralConstants spectral_constants(double alpha_at_zero) {
    SpectralConstants sc;
    sc.lambda_alpha = -4.0 * std::exp(-4.0 * M_PI * alpha_at_zero - 2.0 * euler_gamma);
    sc.c_alpha = 2.0 * std::sqrt(-M_PI * sc.lambda_alpha);
    sc.p_s = cplx(0.0, -sc.lambda_alpha);
    sc.theta_1 = (std::log(0.5) + euler_gamma) / (2.0 * M_PI);
    sc.beta0 = cplx((euler_gamma - std::log(2.0)) / (2.0 * M_PI), -0.125);
    sc.beta_plus = 0.0;
    sc.beta_minus = 0.0;
    return sc;
}

SpectralConstants spectral_constants(const PhysicalParams& params) {
    SpectralConstants sc = spectral_constants(0.0);
    sc.beta_plus = cplx(0.0, 0.5 * params.alpha0);
    sc.beta_minus = -sc.beta_plus;
    return sc;
}

cplx zeta_of_alpha(double alpha_value) {
    const double theta_1 = (std::log(0.5) + euler_gamma) / (2.0 * M_PI);
    return 4.0 * M_PI * cplx(alpha_value + theta_1, -0.125);
}

cplx zeta(double t, const PhysicalParams& params) {
    return zeta_of_alpha(params.alpha0 * std::sin(params.omega * t));
}

cplx free_at_origin(double s, const SpectralConstants& sc) {
    if (!(s > 0.0))
        throw DomainError("free_at_origin: requires s > 0");
    const double x = sc.abs_lambda() * s;
    const SiCi v = sici(x);
    const cplx phase = std::exp(cplx(0.0, -sc.lambda_alpha * s));
    return -(sc.c_alpha / (4.0 * M_PI)) * phase * cplx(v.ci, -v.si);
}

cplx forcing_remainder(double s, const SpectralConstants& sc) {
    if (s < 0.0)
        throw DomainError("forcing_remainder: requires s >= 0");
    if (s < 1e-300)
        return sc.c_alpha * cplx(-std::log(sc.abs_lambda()), -M_PI_2);
    return 4.0 * M_PI * free_at_origin(s, sc)
         + sc.c_alpha * (euler_gamma + std::log(s));
}

std::vector<cplx> forcing_f(const std::vector<double>& times,
                            const SpectralConstants& sc, const NuTable& nu) {
    const std::size_t n = times.size();
    if (n == 0) return {};
    const double h = nu.step;
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(times[j] - h * double(j)) > 1e-9 * std::max(1.0, times[j]))
            throw GridError("forcing_f: times must be the uniform grid of the nu table");
    if (n - 1 > nu.values.size() - 1)
        throw GridError("forcing_f: nu table does not cover the grid");

    // product-integration weights from the table
    std::vector<cplx> f(n);
    std::vector<cplx> r(n);
    for (std::size_t j = 0; j < n; ++j)
        r[j] = forcing_remainder(times[j], sc);
    f[0] = sc.c_alpha;
    for (std::size_t j = 1; j < n; ++j) {
        cplx acc = 0.0;
        for (std::size_t m = 0; m < j; ++m) {
            const std::size_t k = j - 1 - m;        // kernel panel [kh,(k+1)h]
            const double w0 = nu.values[k + 1] - nu.values[k];
            const double w1 = (double(k + 1) * h * nu.values[k + 1] - double(k) * h * nu.values[k])
                            - (nu.cumulative[k + 1] - nu.cumulative[k]);
            const double loc = (w1 - double(k) * h * w0) / h;  // weight of left sample
            acc += r[m] * loc + r[m + 1] * (w0 - loc);
        }
        f[j] = sc.c_alpha + acc;
    }
    return f;
}

ResonanceInfo resonance_info(const PhysicalParams& params) {
    if (!(params.omega > 0.0))
        throw DomainError("resonance_info: requires omega > 0");
    const double E = std::exp(2.0 * (std::log(2.0) - euler_gamma));
    const double ratio = E / params.omega;
    ResonanceInfo info;
    info.nbar = long(std::floor(ratio));
    info.pbar = cplx(0.0, E - params.omega * double(info.nbar));
    const long N = std::lround(ratio);
    info.resonant = (N >= 1) && std::abs(double(N) * params.omega - E) < 1e-12;
    if (info.resonant) {
        info.nbar = N;
        info.pbar = 0.0;
    }
    info.margin = std::abs(info.pbar);
    return info;
}

} // namespace tdpi
