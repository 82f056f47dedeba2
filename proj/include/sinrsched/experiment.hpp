#pragma once

#include "sinrsched/model.hpp"
#include "sinrsched/simulator.hpp"
#include "sinrsched/sinr.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sinrsched {

/// A parameter sweep: one simulation per (gamma, seed) cell. The defaults
/// are the random-topology setup used for the headline experiment
/// (n = 200, lengths in [1, 20], alpha = 2.5, beta = 1, mean power,
/// distributed mode).
struct ExperimentSpec {
    GeneratorParams generator;
    /// Load the instance from this file instead of generating one.
    std::string instance_path;
    /// Fixed topology seed; when unset each cell's seed also picks its topology.
    std::optional<std::uint64_t> instance_seed;
    PowerAssignment power = PowerAssignment::mean();
    Mode mode = Mode::Distributed;
    CarrierSense sense = CarrierSense::Perfect;
    std::vector<double> gammas{0.2};
    std::vector<std::uint64_t> seeds{1};
    std::uint64_t slots = 200000;
    double theta_c = 1.0;
    std::string out_dir = "out";
    std::uint64_t stride = 1;
    unsigned jobs = 1;

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dead links found while validating an instance.
class InstanceRejected : public std::runtime_error {
public:
    explicit InstanceRejected(std::vector<LinkId> dead);
    const std::vector<LinkId>& dead_links() const { return dead_; }

private:
    std::vector<LinkId> dead_;
};

/// `key=value` lines, `#` starts a comment. Unknown keys and out-of-range
/// values raise ConfigError naming the line and the key.
ExperimentSpec parse_config(std::string_view text);
/// Applies `text` on top of an existing spec.
void apply_config(ExperimentSpec& spec, std::string_view text);
/// Sets one key; `line` is only used in diagnostics (0 = command line).
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value,
                   std::size_t line = 0);
/// Cross-field checks (e.g. l_min <= l_max); throws ConfigError.
void validate(const ExperimentSpec& spec);
/// Canonical form: every key, fixed order, shortest round-trip numbers.
std::string serialize_config(const ExperimentSpec& spec);

struct SummaryRow {
    double gamma = 0.0;
    std::uint64_t seed = 0;
    Mode mode = Mode::Distributed;
    std::uint64_t final_max_queue = 0;
    bool stable = true;
    double slope = 0.0;
    double delivered_fraction = 1.0;
    std::string trace_file;
    std::uint64_t trace_rows = 0;

    friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct CellResult {
    SummaryRow row;
    Trace trace;
};

/// The instance a cell runs on; throws InstanceRejected on dead links.
Instance cell_instance(const ExperimentSpec& spec, std::uint64_t seed);

/// Runs one cell in memory without touching the filesystem.
CellResult run_cell(const ExperimentSpec& spec, double gamma, std::uint64_t seed);

struct ExperimentResult {
    std::vector<SummaryRow> rows;
    /// Largest swept gamma at which every seed was judged stable.
    std::optional<double> stable_threshold;
};

/// Runs every cell (up to spec.jobs at once), writes per-cell trace, period,
/// instance and rate files plus summary.csv into spec.out_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::optional<double> stable_threshold(const std::vector<SummaryRow>& rows);

std::string format_number(double v);
std::string cell_name(double gamma, std::uint64_t seed);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace sinrsched
