#ifndef TDPI_CLI_HPP
#define TDPI_CLI_HPP

#include <map>
#include <string>
#include <vector>

namespace tdpi::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    std::string subcommand;
    double alpha0 = 0.0;
    double omega = 1.0;
    double tmax = 10.0;
    double step = 0.005;
    long truncation = 256;
    std::string output = "out";
    std::string format = "csv";
    double seed_perturbation = 0.0;
    std::size_t stride = 10;                  // output thinning for series
    std::vector<double> times{10.0, 20.0};    // recon / mass evaluation times
    std::vector<double> alpha0_list;          // scan grid
    std::vector<double> omega_list;
    double kmax = 30.0;                       // mass radial cutoff
    long n_cut = 8;                           // recon rings
};

// argv-style parsing with an optional key=value config file ('#' comments);
// command-line flags override file values. Throws std::runtime_error with a
// usable message on config errors.
RunConfig parse_config(const std::vector<std::string>& argv);

// Column-oriented table, written as CSV or JSON.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;   // data[c][row]
};

// Writes the table ('.' decimal, '\n' line ends, 17 significant digits for
// CSV; JSON mirrors columns as arrays). Returns the content digest.
std::string write_output(const Table& table, const std::string& format,
                         const std::string& path);

struct RunManifest {
    std::map<std::string, std::string> config;
    std::string version;
    double wall_time_s = 0.0;
    std::map<std::string, double> convergence;
    std::map<std::string, std::string> output_digests;   // path -> sha256
};

// Dispatches the configured subcommand, writes outputs and the manifest
// (<output>.manifest.json). Exit-code conventions live in the frontend.
RunManifest run(const RunConfig& config);

} // namespace tdpi::cli

#endif
