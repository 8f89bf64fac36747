#include "tdpi/cli.hpp"
#include "tdpi/errors.hpp"

#include <json.hpp>

#include <iostream>

namespace {

int fail(int code, const char* type, const std::string& msg) {
    nlohmann::json j;
    j["error"]["type"] = type;
    j["error"]["message"] = msg;
    std::cerr << j.dump() << std::endl;
    return code;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const tdpi::cli::RunConfig cfg = tdpi::cli::parse_config(args);
        tdpi::cli::run(cfg);
        return 0;
    } catch (const tdpi::ResonanceError& e) {
        return fail(4, "resonance", e.what());
    } catch (const tdpi::ConvergenceError& e) {
        return fail(3, "non-convergence", e.what());
    } catch (const tdpi::QuadratureError& e) {
        return fail(3, "non-convergence", e.what());
    } catch (const tdpi::AccuracyError& e) {
        return fail(3, "accuracy", e.what());
    } catch (const tdpi::Error& e) {
        return fail(2, "config", e.what());
    } catch (const std::exception& e) {
        return fail(2, "config", e.what());
    }
}
