#include "sinrsched/experiment.hpp"

#include "sinrsched/arrivals.hpp"
#include "sinrsched/scheduling.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace sinrsched {

namespace {

std::string describe(const std::vector<LinkId>& ids) {
    std::string s;
    for (LinkId l : ids) s += (s.empty() ? "" : ", ") + std::to_string(l);
    return s;
}

std::string where(std::size_t line, const std::string& key) {
    return (line ? "line " + std::to_string(line) + ": " : std::string{}) + "'" + key + "': ";
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v, std::size_t line, const std::string& key) {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError(where(line, key) + "expected a number, got '" + v + "'");
    }
    return out;
}

std::uint64_t to_u64(const std::string& v, std::size_t line, const std::string& key) {
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError(where(line, key) + "expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

void require(bool ok, std::size_t line, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(where(line, key) + what);
}

}  // namespace

InstanceRejected::InstanceRejected(std::vector<LinkId> dead)
    : std::runtime_error("instance rejected: dead link(s) " + describe(dead)), dead_(std::move(dead)) {}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value,
                   std::size_t line) {
    auto positive = [&](double v) { require(v > 0.0, line, key, "must be > 0"); return v; };
    if (key == "mode") {
        try {
            spec.mode = parse_mode(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where(line, key) + e.what());
        }
    } else if (key == "power") {
        try {
            spec.power = PowerAssignment::parse(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where(line, key) + e.what());
        }
    } else if (key == "sense") {
        require(value == "perfect", line, key, "only 'perfect' carrier sensing is supported");
        spec.sense = CarrierSense::Perfect;
    } else if (key == "n") {
        spec.generator.n = to_u64(value, line, key);
        require(spec.generator.n >= 1, line, key, "must be >= 1");
    } else if (key == "l_min") {
        spec.generator.l_min = positive(to_double(value, line, key));
    } else if (key == "l_max") {
        spec.generator.l_max = positive(to_double(value, line, key));
    } else if (key == "side") {
        spec.generator.side = positive(to_double(value, line, key));
    } else if (key == "alpha") {
        spec.generator.alpha = positive(to_double(value, line, key));
    } else if (key == "beta") {
        spec.generator.beta = to_double(value, line, key);
        require(spec.generator.beta >= 1.0, line, key, "must be >= 1");
    } else if (key == "noise") {
        spec.generator.noise = to_double(value, line, key);
        require(spec.generator.noise >= 0.0, line, key, "must be >= 0");
    } else if (key == "instance") {
        spec.instance_path = value;
    } else if (key == "instance_seed") {
        if (value.empty()) {
            spec.instance_seed.reset();
        } else {
            spec.instance_seed = to_u64(value, line, key);
        }
    } else if (key == "gamma") {
        std::vector<double> gammas;
        for (const auto& item : split_list(value)) {
            double g = to_double(item, line, key);
            require(g >= 0.0 && g <= 1.0, line, key, "value " + item + " out of range [0, 1]");
            gammas.push_back(g);
        }
        require(!gammas.empty(), line, key, "needs at least one value");
        spec.gammas = std::move(gammas);
    } else if (key == "seeds") {
        std::vector<std::uint64_t> seeds;
        for (const auto& item : split_list(value)) {
            if (auto dots = item.find(".."); dots != std::string::npos) {
                auto lo = to_u64(trim(item.substr(0, dots)), line, key);
                auto hi = to_u64(trim(item.substr(dots + 2)), line, key);
                require(lo <= hi, line, key, "empty seed range " + item);
                for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
            } else {
                seeds.push_back(to_u64(item, line, key));
            }
        }
        require(!seeds.empty(), line, key, "needs at least one seed");
        spec.seeds = std::move(seeds);
    } else if (key == "slots") {
        spec.slots = to_u64(value, line, key);
        require(spec.slots >= kMinStabilitySlots, line, key,
                "must be >= " + std::to_string(kMinStabilitySlots));
    } else if (key == "theta_c") {
        spec.theta_c = positive(to_double(value, line, key));
    } else if (key == "out") {
        require(!value.empty(), line, key, "must not be empty");
        spec.out_dir = value;
    } else if (key == "stride") {
        spec.stride = to_u64(value, line, key);
        require(spec.stride >= 1, line, key, "must be >= 1");
    } else if (key == "jobs") {
        auto j = to_u64(value, line, key);
        require(j >= 1 && j <= 1024, line, key, "must be in [1, 1024]");
        spec.jobs = static_cast<unsigned>(j);
    } else {
        throw ConfigError(where(line, key) + "unknown key");
    }
}

void apply_config(ExperimentSpec& spec, std::string_view text) {
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        }
        apply_setting(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno);
    }
    validate(spec);
}

ExperimentSpec parse_config(std::string_view text) {
    ExperimentSpec spec;
    apply_config(spec, text);
    return spec;
}

void validate(const ExperimentSpec& spec) {
    if (spec.generator.l_max < spec.generator.l_min) {
        throw ConfigError("'l_max': must be >= l_min");
    }
    if (spec.gammas.empty()) throw ConfigError("'gamma': needs at least one value");
    if (spec.seeds.empty()) throw ConfigError("'seeds': needs at least one seed");
}

std::string serialize_config(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "mode=" << to_string(spec.mode) << '\n';
    out << "power=" << spec.power.to_string() << '\n';
    out << "sense=perfect\n";
    out << "n=" << spec.generator.n << '\n';
    out << "l_min=" << format_number(spec.generator.l_min) << '\n';
    out << "l_max=" << format_number(spec.generator.l_max) << '\n';
    out << "side=" << format_number(spec.generator.side) << '\n';
    out << "alpha=" << format_number(spec.generator.alpha) << '\n';
    out << "beta=" << format_number(spec.generator.beta) << '\n';
    out << "noise=" << format_number(spec.generator.noise) << '\n';
    if (!spec.instance_path.empty()) out << "instance=" << spec.instance_path << '\n';
    if (spec.instance_seed) out << "instance_seed=" << *spec.instance_seed << '\n';
    out << "gamma=";
    for (std::size_t i = 0; i < spec.gammas.size(); ++i) {
        out << (i ? "," : "") << format_number(spec.gammas[i]);
    }
    out << "\nseeds=";
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) out << (i ? "," : "") << spec.seeds[i];
    out << "\nslots=" << spec.slots << '\n';
    out << "theta_c=" << format_number(spec.theta_c) << '\n';
    out << "out=" << spec.out_dir << '\n';
    out << "stride=" << spec.stride << '\n';
    out << "jobs=" << spec.jobs << '\n';
    return out.str();
}

std::string cell_name(double gamma, std::uint64_t seed) {
    return "g" + format_number(gamma) + "_s" + std::to_string(seed);
}

Instance cell_instance(const ExperimentSpec& spec, std::uint64_t seed) {
    Instance inst = spec.instance_path.empty()
                        ? generate_instance(spec.generator, spec.instance_seed.value_or(seed))
                        : load_instance(spec.instance_path);
    auto dead = dead_links(inst, spec.power);
    if (!dead.empty()) throw InstanceRejected(std::move(dead));
    return inst;
}

namespace {

struct CellRun {
    Instance inst;
    RateVector rates;
    CellResult result;
};

CellRun run_cell_full(const ExperimentSpec& spec, double gamma, std::uint64_t seed) {
    Instance inst = cell_instance(spec, seed);
    AffectanceMatrix matrix(inst, spec.power);
    GreedyScheduler scheduler(inst, matrix);
    RateVector rates = gamma > 0.0 ? build_rate_vector(inst, gamma, scheduler)
                                   : RateVector::zero(inst.size());

    SimConfig cfg;
    cfg.mode = spec.mode;
    cfg.theta = default_theta(inst.size(), spec.theta_c);
    cfg.total_slots = spec.slots;
    cfg.gamma = gamma;
    cfg.seed = seed;
    cfg.sense = spec.sense;

    Trace trace;
    if (spec.mode == Mode::Centralized) {
        BernoulliArrivals arrivals(rates, RngStream(seed, "arrivals"));
        trace = run_centralized(inst, matrix, scheduler, arrivals, cfg);
    } else {
        trace = run_distributed(inst, spec.power, rates, cfg);
    }
    if (auto problem = audit_trace(trace); !problem.empty()) throw InvariantViolation(problem);

    SummaryRow row;
    row.gamma = gamma;
    row.seed = seed;
    row.mode = spec.mode;
    const SlotRecord& last = trace.slots.back();
    row.final_max_queue = last.max_queue;
    row.delivered_fraction = last.arrived_cum == 0 ? 1.0
                                                   : static_cast<double>(last.delivered_cum) /
                                                         static_cast<double>(last.arrived_cum);
    StabilityEstimate est = estimate_stability(trace);
    row.stable = est.stable;
    row.slope = est.slope;
    row.trace_file = "trace_" + cell_name(gamma, seed) + ".csv";
    row.trace_rows = trace_rows(trace, spec.stride);
    return CellRun{std::move(inst), std::move(rates), CellResult{row, std::move(trace)}};
}

void write_file(const std::filesystem::path& path, const auto& writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out);
    if (!out) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace

CellResult run_cell(const ExperimentSpec& spec, double gamma, std::uint64_t seed) {
    return std::move(run_cell_full(spec, gamma, seed).result);
}

std::optional<double> stable_threshold(const std::vector<SummaryRow>& rows) {
    std::map<double, bool> all_stable;
    for (const SummaryRow& r : rows) {
        auto [it, fresh] = all_stable.emplace(r.gamma, r.stable);
        if (!fresh) it->second = it->second && r.stable;
    }
    std::optional<double> best;
    for (const auto& [g, ok] : all_stable) {
        if (ok) best = g;
    }
    return best;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    validate(spec);
    namespace fs = std::filesystem;
    const fs::path dir(spec.out_dir);
    fs::create_directories(dir);

    // Reject a bad instance once, before any cell starts.
    if (!spec.instance_path.empty() || spec.instance_seed) cell_instance(spec, spec.seeds.front());

    struct Cell {
        double gamma;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double g : spec.gammas) {
        for (std::uint64_t s : spec.seeds) cells.push_back({g, s});
    }

    std::vector<SummaryRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                CellRun run = run_cell_full(spec, cells[i].gamma, cells[i].seed);
                const std::string name = cell_name(cells[i].gamma, cells[i].seed);
                write_file(dir / run.result.row.trace_file,
                           [&](std::ostream& o) { write_trace_csv(o, run.result.trace, spec.stride); });
                write_file(dir / ("periods_" + name + ".csv"),
                           [&](std::ostream& o) { write_period_csv(o, run.result.trace); });
                write_file(dir / ("instance_" + name + ".txt"),
                           [&](std::ostream& o) { write_instance(o, run.inst); });
                write_file(dir / ("rates_" + name + ".txt"),
                           [&](std::ostream& o) { write_rate_vector(o, run.rates); });
                rows[i] = run.result.row;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cells.size();
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(spec.jobs, cells.size()));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, rows); });
    return ExperimentResult{rows, stable_threshold(rows)};
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "gamma,seed,mode,final_max_queue,stable,slope,delivered_fraction,trace_file,trace_rows\n";
    for (const SummaryRow& r : rows) {
        out << format_number(r.gamma) << ',' << r.seed << ',' << to_string(r.mode) << ','
            << r.final_max_queue << ',' << (r.stable ? "stable" : "unstable") << ','
            << format_number(r.slope) << ',' << format_number(r.delivered_fraction) << ','
            << r.trace_file << ',' << r.trace_rows << '\n';
    }
}

}  // namespace sinrsched
