// Experiment driver: sweeps (gamma, seed) cells, writes trace CSVs and a
// summary table, and prints the largest gamma judged stable.
//
// Exit codes: 0 success, 2 config error, 3 invariant violation,
// 4 instance rejection.

#include "sinrsched/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kConfigError = 2;
constexpr int kInvariantViolation = 3;
constexpr int kInstanceRejected = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sinrsched::ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace sinrsched;

    CLI::App app{"SINR link-scheduling stability simulator"};
    std::string config_path;
    app.add_option("--config", config_path, "key=value experiment file");

    // Flag name -> config key. Flags override the config file.
    const std::vector<std::pair<std::string, std::string>> overrides{
        {"--mode", "mode"},     {"--gamma", "gamma"},     {"--seeds", "seeds"},
        {"--slots", "slots"},   {"--theta-c", "theta_c"}, {"--power", "power"},
        {"--out", "out"},       {"--stride", "stride"},   {"--instance", "instance"},
        {"--jobs", "jobs"},
    };
    std::vector<std::string> values(overrides.size());
    for (std::size_t i = 0; i < overrides.size(); ++i) {
        app.add_option(overrides[i].first, values[i], "overrides config key '" + overrides[i].second + "'");
    }
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config, "print the effective config in canonical form and exit");
    std::string write_instance_path;
    app.add_option("--write-instance", write_instance_path,
                   "write the instance of the first seed to this file and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    ExperimentSpec spec;
    try {
        if (!config_path.empty()) apply_config(spec, read_file(config_path));
        for (std::size_t i = 0; i < overrides.size(); ++i) {
            if (app.count(overrides[i].first) > 0) apply_setting(spec, overrides[i].second, values[i]);
        }
        validate(spec);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    if (dump_config) {
        std::cout << serialize_config(spec);
        return 0;
    }

    try {
        if (!write_instance_path.empty()) {
            save_instance(write_instance_path, cell_instance(spec, spec.seeds.front()));
            return 0;
        }

        ExperimentResult result = run_experiment(spec);
        write_summary_csv(std::cout, result.rows);
        std::cout << "summary written to " << spec.out_dir << "/summary.csv\n";
        if (result.stable_threshold) {
            std::cout << "largest stable gamma: " << format_number(*result.stable_threshold) << '\n';
        } else {
            std::cout << "largest stable gamma: none\n";
        }
    } catch (const InstanceRejected& e) {
        std::cerr << e.what() << '\n';
        return kInstanceRejected;
    } catch (const InstanceError& e) {
        std::cerr << "instance error: " << e.what() << '\n';
        return kInstanceRejected;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kInvariantViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
