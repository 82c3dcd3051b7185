// fracres: repetition-rate scans of a pulse-driven Lambda atom.
//
//   fracres run fig2 --omega-ab 11 --grid 1:13:600 --workers 8 --out out/
//   fracres run classical --omega0 10 --damping 0.2
//   fracres run --config run.json --strict

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fracres/app.hpp"

namespace {

// "min:max:points"
nlohmann::json parse_grid(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw fracres::ConfigError("grid", "expected min:max:points");
    nlohmann::json j;
    try {
        std::size_t used = 0;
        j["grid.min"] = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("min");
        j["grid.max"] = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("max");
        j["grid.points"] = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("points");
    } catch (const std::logic_error&) {
        throw fracres::ConfigError("grid", "expected min:max:points with numeric fields, got '" + s + "'");
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional resonances of a pulse-driven three-level atom"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "run a repetition-rate scan and write spectrum artifacts");

    std::optional<std::string> scenario_pos, scenario_flag, config_path, grid, out;
    std::optional<double> omega_ab, rabi_ac, rabi_bc, omega0, damping;
    std::optional<int> workers;
    std::vector<double> dumps;
    bool strict = false;

    run->add_option("SCENARIO", scenario_pos, "fig2 | fig3 | fig5 | classical | custom");
    run->add_option("--scenario", scenario_flag, "fig2 | fig3 | fig5 | classical | custom");
    run->add_option("--config", config_path, "flat dotted-key JSON config file")->check(CLI::ExistingFile);
    run->add_option("--omega-ab", omega_ab, "lower-doublet splitting");
    run->add_option("--rabi-ac", rabi_ac, "Rabi amplitude of E_ac on a-c");
    run->add_option("--rabi-bc", rabi_bc, "Rabi amplitude of E_bc on b-c");
    run->add_option("--omega0", omega0, "classical oscillator frequency");
    run->add_option("--damping", damping, "classical oscillator damping");
    run->add_option("--grid", grid, "repetition-rate grid min:max:points");
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--strict", strict, "exit nonzero if any grid point failed");
    run->add_option("--out", out, "output directory");
    run->add_option("--dump-trajectory", dumps, "write the steady-state trajectory at this repetition rate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scenario_pos && scenario_flag && *scenario_pos != *scenario_flag)
            throw fracres::ConfigError("scenario", "positional and --scenario disagree");
        const std::optional<std::string> scenario = scenario_flag ? scenario_flag : scenario_pos;

        nlohmann::json flags = nlohmann::json::object();
        if (omega_ab) flags["omega_ab"] = *omega_ab;
        if (rabi_ac) flags["rabi_ac"] = *rabi_ac;
        if (rabi_bc) flags["rabi_bc"] = *rabi_bc;
        if (omega0) flags["classical.omega0"] = *omega0;
        if (damping) flags["classical.damping"] = *damping;
        if (grid) flags.update(parse_grid(*grid));
        if (workers) flags["workers"] = *workers;
        if (strict) flags["output.strict"] = true;
        if (out) flags["output.dir"] = *out;
        if (!dumps.empty()) flags["output.dump_trajectory"] = dumps;

        const fracres::RunConfig cfg = fracres::resolve_config(config_path, scenario, flags);
        return fracres::run(cfg, std::cout).exit_code;
    } catch (const fracres::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
