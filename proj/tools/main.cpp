#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nafl/aircraft.hpp"
#include "nafl/controller.hpp"
#include "nafl/error.hpp"
#include "nafl/oracle.hpp"
#include "nafl/registry.hpp"
#include "nafl/scenario.hpp"
#include "nafl/simulate.hpp"
#include "nafl/trace.hpp"

namespace {

namespace fs = std::filesystem;
using nafl::Error;
using nafl::ErrorKind;

constexpr int kExitOk = 0;
constexpr int kExitDiverged = 2;
constexpr int kExitConfig = 3;
constexpr int kExitOther = 1;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Divergence:
        case ErrorKind::Singularity:
            return kExitDiverged;
        case ErrorKind::Configuration:
        case ErrorKind::InvalidInput:
        case ErrorKind::Shape:
        case ErrorKind::Stability:
        case ErrorKind::Trim:
            return kExitConfig;
        default:
            return kExitOther;
    }
}

std::string format_vector(const nafl::Vector& v) {
    std::ostringstream out;
    out << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v(i));
        out << (i ? ", " : "") << buf;
    }
    out << ']';
    return out.str();
}

void print_summary(std::ostream& out, const nafl::sim::ScenarioConfig& config, const nafl::sim::RunResult& result) {
    const auto& s = result.summary;
    out << "scenario " << config.name << " (" << config.plant << ", " << nafl::control::to_string(config.mode)
        << ")\n";
    out << "  records:            " << result.trace.records.size() << '\n';
    out << "  final error:        " << format_vector(s.final_error) << '\n';
    out << "  max |e| after " << config.summary.settle_time << " s: " << format_vector(s.max_error_after_settle)
        << '\n';
    out << "  steady mean |e|:    " << format_vector(s.steady_mean_abs_error) << '\n';
    out << "  V_s peak:           " << s.vs_peak << '\n';
    out << "  V_s settle time:    ";
    if (s.vs_settle_time) {
        out << *s.vs_settle_time << " s\n";
    } else {
        out << "not reached\n";
    }
    out << "  status:             " << s.message << '\n';
}

nafl::sim::ScenarioConfig load_with_overrides(const std::string& path, const std::string& mode, bool no_integral,
                                              bool no_errors) {
    auto config = nafl::sim::load_scenario(path);
    if (!mode.empty()) {
        config.mode = nafl::control::parse_mode(mode);
    }
    if (no_integral) {
        nafl::sim::disable_integral(config);
    }
    if (no_errors) {
        nafl::sim::disable_errors(config);
    }
    config.validate();
    return config;
}

std::vector<std::complex<double>> parse_pole_list(const std::string& text) {
    std::vector<std::complex<double>> poles;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        poles.push_back(nafl::sim::parse_pole(item));
    }
    if (poles.empty()) {
        throw Error(ErrorKind::Configuration, "empty pole list");
    }
    return poles;
}

int cmd_run(const std::string& config_path, const std::string& out_path, const std::string& mode, bool no_integral,
            bool no_errors) {
    const auto config = load_with_overrides(config_path, mode, no_integral, no_errors);
    const auto result = nafl::sim::run_scenario(config);
    if (!out_path.empty()) {
        nafl::sim::write_trace(result.trace, out_path);
    }
    print_summary(std::cout, config, result);
    return result.summary.diverged ? kExitDiverged : kExitOk;
}

int cmd_trim(const std::string& plant, double V, double h) {
    if (plant != "aircraft-3dof") {
        throw Error(ErrorKind::Configuration, "trim is only defined for aircraft-3dof");
    }
    const nafl::aircraft::AeroModel aero;
    const auto trim = nafl::aircraft::trim_level_flight(V, h, aero);
    std::printf("V = %.6g m/s, h = %.6g m\nalpha_deg = %.12g\neta = %.12g\n", V, h, trim.alpha * kRadToDeg,
                trim.eta);
    return kExitOk;
}

int cmd_gains(const std::string& spec) {
    std::istringstream in(spec);
    std::string axis;
    int index = 0;
    while (std::getline(in, axis, ';')) {
        const auto poles = parse_pole_list(axis);
        const auto k = nafl::control::pole_gains(poles);
        std::cout << "axis " << ++index << ": alpha = " << k.size() << ", k =";
        for (double kj : k) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.12g", kj);
            std::cout << buf;
        }
        std::cout << '\n';
    }
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    const auto config = nafl::sim::load_scenario(config_path);
    const auto result = nafl::sim::run_scenario(config);
    const auto cmp = nafl::sim::compare_with_oracle(config, result.trace);
    std::cout << "scenario " << config.name << '\n';
    if (!cmp.start_time) {
        std::cout << "  V_s never dropped below 1e-8; no samples compared\n";
    } else {
        std::printf("  compared %d samples from t = %.6g s (%d oracle failures)\n", cmp.samples, *cmp.start_time,
                    cmp.failures);
        std::printf("  max |u - u_oracle| = %.6e\n", cmp.max_deviation);
    }
    return result.summary.diverged ? kExitDiverged : kExitOk;
}

struct BatchOutcome {
    int code = kExitOk;
    std::string report;
};

BatchOutcome run_one(const fs::path& path) {
    BatchOutcome outcome;
    std::ostringstream out;
    try {
        const auto config = nafl::sim::load_scenario(path);
        const auto result = nafl::sim::run_scenario(config);
        print_summary(out, config, result);
        outcome.code = result.summary.diverged ? kExitDiverged : kExitOk;
    } catch (const Error& e) {
        out << path.filename().string() << ": " << e.what() << '\n';
        outcome.code = exit_code_for(e);
    }
    outcome.report = out.str();
    return outcome;
}

int cmd_batch(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw Error(ErrorKind::Configuration, "not a directory: " + dir);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<std::future<BatchOutcome>> jobs;
    jobs.reserve(files.size());
    for (const auto& file : files) {
        jobs.push_back(std::async(std::launch::async, run_one, file));
    }
    int code = kExitOk;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto outcome = jobs[i].get();
        std::cout << "== " << files[i].string() << '\n' << outcome.report;
        code = std::max(code, outcome.code);
    }
    std::cout << files.size() << " scenario(s)\n";
    return code;
}

int cmd_list_plants() {
    for (const auto& entry : nafl::plant::plant_registry()) {
        std::cout << entry.name << ": " << entry.description << '\n';
        std::cout << "  states:";
        for (const auto& ch : entry.states) std::cout << ' ' << ch.name;
        std::cout << "\n  controls:";
        for (const auto& ch : entry.controls) std::cout << ' ' << ch.name;
        std::cout << "\n  outputs:";
        for (const auto& o : entry.outputs) std::cout << ' ' << o;
        std::cout << '\n';
    }
    return kExitOk;
}

int cmd_defaults() {
    std::cout << nafl::sim::route_scenario_json().dump(2) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear dynamic-inversion tracking simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string mode;
    bool no_integral = false;
    bool no_errors = false;
    auto* run = app.add_subcommand("run", "Simulate a scenario");
    run->add_option("--config", config_path, "Scenario JSON")->required();
    run->add_option("--out", out_path, "Trace CSV output");
    run->add_option("--mode", mode, "full | inverse-free | pure-inverse");
    run->add_flag("--no-integral", no_integral, "Zero the integral gains");
    run->add_flag("--no-errors", no_errors, "Use the nominal truth model");

    std::string plant = "aircraft-3dof";
    double V = 50.0;
    double h = 1000.0;
    auto* trim = app.add_subcommand("trim", "Level-flight trim");
    trim->set_help_flag("--help", "Print this help message and exit");
    trim->add_option("--plant", plant, "Plant name");
    trim->add_option("--V", V, "Airspeed, m/s");
    trim->add_option("--h", h, "Altitude, m");

    std::string poles;
    auto* gains = app.add_subcommand("gains", "Gains from closed-loop poles");
    gains->add_option("--poles", poles, "Comma-separated poles, axes separated by ';' (e.g. \"-1,-2;-2+1i,-2-1i\")")
        ->required()
        ->allow_extra_args(false);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Compare the run against the Newton oracle");
    validate->add_option("--config", validate_path, "Scenario JSON")->required();

    std::string batch_dir;
    auto* batch = app.add_subcommand("batch", "Run every *.json in a directory");
    batch->add_option("--dir", batch_dir, "Scenario directory")->required();

    auto* list = app.add_subcommand("list-plants", "List registered plants");
    auto* defaults = app.add_subcommand("defaults", "Print the packaged aircraft scenario");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(config_path, out_path, mode, no_integral, no_errors);
        if (*trim) return cmd_trim(plant, V, h);
        if (*gains) return cmd_gains(poles);
        if (*validate) return cmd_validate(validate_path);
        if (*batch) return cmd_batch(batch_dir);
        if (*list) return cmd_list_plants();
        if (*defaults) return cmd_defaults();
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
    return kExitOther;
}
