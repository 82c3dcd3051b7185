#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fracres/config.hpp"

using namespace fracres;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / ("fracres_cfg_" + name);
    std::ofstream(p) << text;
    return p.string();
}

std::string error_field(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

}  // namespace

TEST(Config, PresetsAreValid) {
    for (const char* s : {"fig2", "fig3", "fig5", "custom", "classical"}) {
        const RunConfig c = resolve_config(std::nullopt, std::string(s), json::object());
        EXPECT_EQ(c.scenario_name(), s);
    }
    EXPECT_EQ(error_field([] { resolve_config(std::nullopt, std::string("fig9"), json::object()); }), "scenario");
}

TEST(Config, DefaultsFollowTheScenario) {
    const RunConfig c = resolve_config(std::nullopt, std::nullopt, json::object());
    EXPECT_EQ(c.sweep.scenario, Scenario::fig2);
    EXPECT_EQ(c.sweep.grid_points, 600);
    EXPECT_EQ(c.sweep.params.omega_ab, 11.0);
    EXPECT_EQ(c.sweep.params.rabi_acb, c.sweep.params.rabi_ac);
    EXPECT_EQ(c.sweep.params.rabi_bca, c.sweep.params.rabi_bc);
    const RunConfig f3 = resolve_config(std::nullopt, std::string("fig3"), json::object());
    EXPECT_EQ(f3.sweep.f1.kind, EnvelopeKind::mixed);
    EXPECT_EQ(f3.sweep.params.rabi_bc, 0.0);
}

TEST(Config, UnknownKeyRejected) {
    EXPECT_EQ(error_field([] { apply_overrides(RunConfig{}, json{{"grid.pionts", 10}}); }), "grid.pionts");
    EXPECT_EQ(error_field([] { apply_overrides(RunConfig{}, json{{"omega", 10}}); }), "omega");
}

TEST(Config, TypesAreChecked) {
    EXPECT_EQ(error_field([] { apply_overrides(RunConfig{}, json{{"grid.points", 10.5}}); }), "grid.points");
    EXPECT_EQ(error_field([] { apply_overrides(RunConfig{}, json{{"omega_ab", "11"}}); }), "omega_ab");
    EXPECT_EQ(error_field([] { apply_overrides(RunConfig{}, json{{"output.strict", 1}}); }), "output.strict");
    EXPECT_EQ(error_field([] { apply_overrides(RunConfig{}, json{{"f2.kind", "square"}}); }), "f2.kind");
}

TEST(Config, NegativeDecayNamesTheField) {
    EXPECT_EQ(error_field([] { resolve_config(std::nullopt, std::nullopt, json{{"gamma_ac", -1.0}}); }), "gamma_ac");
}

TEST(Config, CrossAmplitudes) {
    // follow the direct amplitudes unless told otherwise
    RunConfig c = apply_overrides(RunConfig{}, json{{"rabi_ac", 2.0}});
    EXPECT_EQ(c.sweep.params.rabi_acb, 2.0);
    EXPECT_EQ(error_field([] { apply_overrides(RunConfig{}, json{{"rabi_acb", 0.5}}); }), "rabi_acb");
    c = apply_overrides(RunConfig{}, json{{"cross.follows_direct", false}, {"rabi_acb", 0.5}});
    EXPECT_EQ(c.sweep.resolved_params().rabi_acb, 0.5);
}

TEST(Config, FileWithCommentsAndFlagPrecedence) {
    const std::string path = write_temp("a.json", R"({
        // a scan of the combination comb
        "scenario": "fig3",
        "grid.points": 40,
        "omega_ab": 9.0
    })");
    const RunConfig c = resolve_config(path, std::nullopt, json{{"omega_ab", 10.0}});
    EXPECT_EQ(c.sweep.scenario, Scenario::fig3);
    EXPECT_EQ(c.sweep.grid_points, 40);
    EXPECT_EQ(c.sweep.params.omega_ab, 10.0);
    EXPECT_EQ(resolve_config(path, std::string("fig2"), json::object()).sweep.scenario, Scenario::fig2);
}

TEST(Config, BadFile) {
    EXPECT_EQ(error_field([] { resolve_config(std::string("/nonexistent/x.json"), std::nullopt, json::object()); }),
              "config");
    const std::string path = write_temp("b.json", "[1, 2]");
    EXPECT_EQ(error_field([&] { resolve_config(path, std::nullopt, json::object()); }), "config");
    const std::string broken = write_temp("c.json", "{\"grid.points\": ");
    EXPECT_EQ(error_field([&] { resolve_config(broken, std::nullopt, json::object()); }), "config");
}

TEST(Config, EchoRoundTrips) {
    for (const char* s : {"fig2", "fig3", "fig5", "classical"}) {
        const RunConfig c = resolve_config(std::nullopt, std::string(s),
                                           json{{"grid.points", 77}, {"workers", 3}, {"output.dump_trajectory", {5.5}}});
        const json echo = to_json(c);
        const std::string path = write_temp(std::string("echo_") + s + ".json", echo.dump());
        const RunConfig d = resolve_config(path, std::nullopt, json::object());
        EXPECT_EQ(to_json(d), echo) << s;
    }
}

TEST(Config, ValidationCatchesGrid) {
    EXPECT_EQ(error_field([] { resolve_config(std::nullopt, std::nullopt, json{{"grid.points", 1}}); }),
              "grid.points");
    EXPECT_EQ(error_field([] { resolve_config(std::nullopt, std::nullopt, json{{"grid.min", 5.0}, {"grid.max", 4.0}}); }),
              "grid.max");
    EXPECT_EQ(error_field([] { resolve_config(std::nullopt, std::nullopt, json{{"workers", 0}}); }), "workers");
}
