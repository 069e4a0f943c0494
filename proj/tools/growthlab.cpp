#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "growthlab/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"growthlab: BGP analytics, transitional dynamics, and policy "
                 "experiments for a data-economy growth model"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run a scenario config file");
    run->add_option("config", config_path, "path to key = value config")->required();

    std::string preset_name, preset_out;
    auto* preset = app.add_subcommand("preset", "run a named built-in preset");
    preset->add_option("name", preset_name, "preset name (see 'list')")->required();
    preset->add_option("--out", preset_out, "override the preset's output directory");

    auto* list = app.add_subcommand("list", "list available presets");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "parse and validate a config, run nothing");
    validate->add_option("config", validate_path, "path to key = value config")->required();

    CLI11_PARSE(app, argc, argv);

    using namespace growthlab;

    if (run->parsed()) return run_scenario_file(config_path);

    if (preset->parsed()) {
        const Preset* p = find_preset(preset_name);
        if (!p) {
            std::cerr << "unknown preset '" << preset_name << "'; see 'growthlab list'\n";
            return kValidationFailure;
        }
        ScenarioConfig cfg;
        try {
            cfg = parse_config_text(p->config);
        } catch (const ConfigError& e) {
            std::cerr << e.what() << "\n";
            return kValidationFailure;
        }
        if (!preset_out.empty()) cfg.out_dir = preset_out;
        return run_scenario(cfg);
    }

    if (list->parsed()) {
        for (const auto& p : presets())
            std::cout << p.name << "  -  " << p.description << "\n";
        return kOk;
    }

    if (validate->parsed()) {
        ScenarioConfig cfg;
        try {
            cfg = parse_config_file(validate_path);
        } catch (const ConfigError& e) {
            std::cerr << e.what() << "\n";
            return kValidationFailure;
        }
        const ValidationReport vr = validate_params(cfg.params);
        if (!vr.valid) {
            for (const auto& v : vr.violated_conditions)
                std::cerr << "parameter validation: " << v.condition << " (" << v.bound << ")\n";
            return kValidationFailure;
        }
        for (const auto& f : vr.flags) std::cout << "note: " << f << "\n";
        std::cout << "ok: experiment '" << experiment_name(cfg.experiment) << "', parameters valid\n";
        return kOk;
    }

    return kOk;
}
