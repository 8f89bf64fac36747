#include "tdpi/cli.hpp"
#include "tdpi/digest.hpp"
#include "tdpi/errors.hpp"
#include "tdpi/observables.hpp"
#include "tdpi/poles.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace tdpi::cli {

namespace {

std::vector<double> parse_list(const std::string& s, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::runtime_error("type error: " + flag + " entry '" + tok + "'");
        }
    }
    return out;
}

const std::vector<std::string> kSubcommands{
    "charge", "survival", "mass", "laplace-check", "pole", "scan", "recon"};

bool spectral_subcommand(const std::string& s) {
    return s == "laplace-check" || s == "pole" || s == "scan" || s == "recon";
}

} // namespace

RunConfig parse_config(const std::vector<std::string>& argv) {
    RunConfig cfg;
    std::string times_s, alpha0s_s, omegas_s;

    CLI::App app{"time-dependent 2d point-interaction toolbox"};
    app.set_config("--config", "", "key=value configuration file");
    app.add_option("subcommand", cfg.subcommand,
                   "charge|survival|mass|laplace-check|pole|scan|recon")
        ->required();
    app.add_option("--alpha0", cfg.alpha0, "coupling amplitude");
    app.add_option("--omega", cfg.omega, "driving frequency");
    app.add_option("--tmax", cfg.tmax, "time horizon");
    app.add_option("--step", cfg.step, "grid step h");
    app.add_option("--truncation", cfg.truncation, "strip truncation N");
    app.add_option("--output", cfg.output, "output path stem");
    app.add_option("--format", cfg.format, "csv|json");
    app.add_option("--seed-perturbation", cfg.seed_perturbation,
                   "explicit shift applied near singular points");
    app.add_option("--stride", cfg.stride, "output thinning for series");
    app.add_option("--times", times_s, "comma-separated evaluation times");
    app.add_option("--alpha0s", alpha0s_s, "comma-separated scan amplitudes");
    app.add_option("--omegas", omegas_s, "comma-separated scan frequencies");
    app.add_option("--kmax", cfg.kmax, "radial cutoff for the mass integral");
    app.add_option("--ncut", cfg.n_cut, "ring cutoff for reconstruction");
    app.allow_extras(false);

    std::vector<std::string> rev(argv.rbegin(), argv.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        throw std::runtime_error(std::string("config error: ") + e.what());
    }

    if (!times_s.empty()) cfg.times = parse_list(times_s, "--times");
    if (!alpha0s_s.empty()) cfg.alpha0_list = parse_list(alpha0s_s, "--alpha0s");
    if (!omegas_s.empty()) cfg.omega_list = parse_list(omegas_s, "--omegas");

    if (std::find(kSubcommands.begin(), kSubcommands.end(), cfg.subcommand)
        == kSubcommands.end())
        throw std::runtime_error("config error: unknown subcommand '" + cfg.subcommand + "'");
    if (!(cfg.step > 0.0))
        throw std::runtime_error("range error: --step must be > 0");
    if (!(cfg.tmax > 0.0))
        throw std::runtime_error("range error: --tmax must be > 0");
    if (!(cfg.omega > 0.0))
        throw std::runtime_error("range error: --omega must be > 0");
    if (cfg.format != "csv" && cfg.format != "json")
        throw std::runtime_error("range error: --format must be csv or json");
    if (cfg.truncation < 8)
        throw std::runtime_error("range error: --truncation must be >= 8");

    if (spectral_subcommand(cfg.subcommand)) {
        std::vector<double> omegas = cfg.omega_list.empty()
            ? std::vector<double>{cfg.omega} : cfg.omega_list;
        for (double om : omegas) {
            PhysicalParams p;
            p.omega = om;
            const ResonanceInfo ri = resonance_info(p);
            if (ri.resonant)
                throw ResonanceError(
                    "resonance: omega = " + std::to_string(om) + " satisfies N*omega = "
                    "e^{2(log2-gamma)} with N = " + std::to_string(ri.nbar),
                    ri.nbar);
        }
    }
    return cfg;
}

std::string write_output(const Table& table, const std::string& format,
                         const std::string& path) {
    for (std::size_t c = 0; c < table.data.size(); ++c)
        for (std::size_t r = 0; r < table.data[c].size(); ++r)
            if (!std::isfinite(table.data[c][r]))
                throw Error("non-finite value in output column '" + table.columns[c]
                            + "' row " + std::to_string(r));

    std::ostringstream os;
    if (format == "csv") {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            os << (c ? "," : "") << table.columns[c];
        os << "\n";
        const std::size_t rows = table.data.empty() ? 0 : table.data[0].size();
        char buf[40];
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < table.data.size(); ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", table.data[c][r]);
                os << (c ? "," : "") << buf;
            }
            os << "\n";
        }
    } else if (format == "json") {
        nlohmann::json j;
        j["columns"] = table.columns;
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            j["data"][table.columns[c]] = table.data[c];
        os << j.dump(2) << "\n";
    } else {
        throw Error("write_output: unknown format '" + format + "'");
    }

    const std::string bytes = os.str();
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("write_output: cannot open '" + path + "'");
    f << bytes;
    f.close();
    if (!f)
        throw Error("write_output: write failed for '" + path + "'");
    return sha256_hex(bytes);
}

namespace {

std::map<std::string, std::string> config_map(const RunConfig& c) {
    auto d = [](double v) {
        char b[40];
        std::snprintf(b, sizeof b, "%.17g", v);
        return std::string(b);
    };
    std::map<std::string, std::string> m;
    m["subcommand"] = c.subcommand;
    m["alpha0"] = d(c.alpha0);
    m["omega"] = d(c.omega);
    m["tmax"] = d(c.tmax);
    m["step"] = d(c.step);
    m["truncation"] = std::to_string(c.truncation);
    m["output"] = c.output;
    m["format"] = c.format;
    m["seed_perturbation"] = d(c.seed_perturbation);
    m["stride"] = std::to_string(c.stride);
    m["kmax"] = d(c.kmax);
    m["ncut"] = std::to_string(c.n_cut);
    auto join = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + d(v[i]);
        return s;
    };
    m["times"] = join(c.times);
    m["alpha0s"] = join(c.alpha0_list);
    m["omegas"] = join(c.omega_list);
    return m;
}

void write_manifest(const RunManifest& man, const std::string& path) {
    nlohmann::json j;
    j["version"] = man.version;
    j["wall_time_s"] = man.wall_time_s;
    j["config"] = man.config;
    j["convergence"] = man.convergence;
    j["outputs"] = man.output_digests;
    std::ofstream f(path, std::ios::binary);
    f << j.dump(2) << "\n";
}

} // namespace

RunManifest run(const RunConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    RunManifest man;
    man.version = kVersion;
    man.config = config_map(cfg);

    PhysicalParams prm;
    prm.alpha0 = cfg.alpha0;
    prm.omega = cfg.omega;
    const SpectralConstants sc = spectral_constants(prm);
    const std::string out_path = cfg.output + "." + cfg.format;
    Table tab;

    if (cfg.subcommand == "charge" || cfg.subcommand == "survival"
        || cfg.subcommand == "mass") {
        const ChargeGrid g = solve_charge(prm, sc, cfg.tmax, cfg.step);
        if (cfg.subcommand == "charge") {
            tab.columns = {"t", "re_q", "im_q", "abs_q"};
            tab.data.assign(4, {});
            for (std::size_t j = 0; j < g.q.size(); j += cfg.stride) {
                tab.data[0].push_back(g.time(j));
                tab.data[1].push_back(g.q[j].real());
                tab.data[2].push_back(g.q[j].imag());
                tab.data[3].push_back(std::abs(g.q[j]));
            }
        } else if (cfg.subcommand == "survival") {
            const SurvivalSeries s = survival_series(g, cfg.stride);
            tab.columns = {"t", "re_theta", "im_theta", "abs_theta", "abs_z1", "abs_z"};
            tab.data.assign(6, {});
            for (std::size_t i = 0; i < s.times.size(); ++i) {
                tab.data[0].push_back(s.times[i]);
                tab.data[1].push_back(s.theta[i].real());
                tab.data[2].push_back(s.theta[i].imag());
                tab.data[3].push_back(std::abs(s.theta[i]));
                tab.data[4].push_back(std::abs(s.z1[i]));
                tab.data[5].push_back(std::abs(s.z[i]));
            }
        } else {
            tab.columns = {"t", "mass"};
            tab.data.assign(2, {});
            for (double t : cfg.times) {
                const double tt = cfg.step * std::llround(t / cfg.step);
                tab.data[0].push_back(tt);
                tab.data[1].push_back(mass(tt, g, sc, cfg.kmax));
            }
        }
    } else if (cfg.subcommand == "laplace-check") {
        const ChargeGrid g = solve_charge(prm, sc, cfg.tmax, cfg.step);
        tab.columns = {"re_p", "im_p", "functional_residual"};
        tab.data.assign(3, {});
        const std::vector<cplx> pts{{2.0 + cfg.seed_perturbation, 0.3},
                                    {2.5 + cfg.seed_perturbation, 0.0},
                                    {3.0 + cfg.seed_perturbation, 0.0}};
        for (const cplx p : pts) {
            tab.data[0].push_back(p.real());
            tab.data[1].push_back(p.imag());
            tab.data[2].push_back(functional_residual(p, g, prm, sc));
        }
    } else if (cfg.subcommand == "pole") {
        const PoleResult pr = find_pole(prm, sc, cfg.truncation);
        man.convergence["agree"] = pr.agree;
        tab.columns = {"alpha0", "omega", "re_seed", "im_seed", "re_p0", "im_p0",
                       "winding", "agree", "recursion_residual", "decay_constant"};
        tab.data.assign(10, {});
        double rres = 0.0, dcon = 0.0;
        cplx p0 = 0.0;
        if (pr.found) {
            const ResidueSet rs = residues(pr, prm, sc);
            rres = rs.recursion_residual;
            dcon = rs.decay_constant;
            p0 = pr.p0;
        }
        const double row[10] = {cfg.alpha0, cfg.omega, pr.seed.real(), pr.seed.imag(),
                                p0.real(), p0.imag(), double(pr.winding),
                                pr.found ? pr.agree : 0.0, rres, dcon};
        for (int c = 0; c < 10; ++c) tab.data[std::size_t(c)].push_back(row[c]);
    } else if (cfg.subcommand == "scan") {
        const std::vector<double> as =
            cfg.alpha0_list.empty() ? std::vector<double>{cfg.alpha0} : cfg.alpha0_list;
        const std::vector<double> os =
            cfg.omega_list.empty() ? std::vector<double>{cfg.omega} : cfg.omega_list;
        struct Row {
            double a, o, re, im, w, agree;
        };
        std::vector<std::pair<double, double>> pts;
        for (double a : as)
            for (double o : os) pts.emplace_back(a, o);
        std::sort(pts.begin(), pts.end());
        std::vector<Row> rows(pts.size());
        const unsigned nthreads = std::max(1u, std::thread::hardware_concurrency());
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < nthreads; ++w)
            workers.emplace_back([&, w]() {
                for (std::size_t i = w; i < pts.size(); i += nthreads) {
                    PhysicalParams p;
                    p.alpha0 = pts[i].first;
                    p.omega = pts[i].second;
                    const SpectralConstants s = spectral_constants(p);
                    Row r{p.alpha0, p.omega, 0.0, 0.0, 0.0, 0.0};
                    try {
                        const PoleResult pr = find_pole(p, s, cfg.truncation);
                        if (pr.found) {
                            r.re = pr.p0.real();
                            r.im = pr.p0.imag();
                            r.w = double(pr.winding);
                            r.agree = pr.agree;
                        }
                    } catch (const Error&) {
                        // recorded as a no-pole row
                    }
                    rows[i] = r;
                }
            });
        for (auto& th : workers) th.join();
        tab.columns = {"alpha0", "omega", "re_p0", "im_p0", "winding", "agree"};
        tab.data.assign(6, {});
        for (const Row& r : rows) {
            tab.data[0].push_back(r.a);
            tab.data[1].push_back(r.o);
            tab.data[2].push_back(r.re);
            tab.data[3].push_back(r.im);
            tab.data[4].push_back(r.w);
            tab.data[5].push_back(r.agree);
        }
    } else if (cfg.subcommand == "recon") {
        const PoleResult pr = find_pole(prm, sc, cfg.truncation);
        if (!pr.found)
            throw ConvergenceError("recon: no pole found for these parameters");
        const ResidueSet rs = residues(pr, prm, sc, std::max<long>(cfg.n_cut + 8, 32));
        man.convergence["agree"] = pr.agree;
        man.convergence["recursion_residual"] = rs.recursion_residual;
        double tmax_need = 0.0;
        for (double t : cfg.times) tmax_need = std::max(tmax_need, t);
        const ChargeGrid g = solve_charge(prm, sc, tmax_need + cfg.step, cfg.step);
        tab.columns = {"t", "re_z_recon", "im_z_recon", "re_z_direct", "im_z_direct",
                       "rel_err"};
        tab.data.assign(6, {});
        for (double t : cfg.times) {
            const double tt = cfg.step * std::llround(t / cfg.step);
            const ReconstructedZ rz = reconstruct_Z(tt, pr, rs, prm, sc, cfg.n_cut,
                                                    default_tau_grid(tt),
                                                    cfg.truncation);
            const cplx direct = z_interaction({tt}, g, sc)[0];
            tab.data[0].push_back(tt);
            tab.data[1].push_back(rz.z.real());
            tab.data[2].push_back(rz.z.imag());
            tab.data[3].push_back(direct.real());
            tab.data[4].push_back(direct.imag());
            tab.data[5].push_back(std::abs(rz.z - direct) / std::abs(direct));
        }
    }

    man.output_digests[out_path] = write_output(tab, cfg.format, out_path);
    man.wall_time_s = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t_start).count();
    write_manifest(man, cfg.output + ".manifest.json");
    return man;
}

} // namespace tdpi::cli
