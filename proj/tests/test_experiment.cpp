#include "sinrsched/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace sinrsched;
namespace fs = std::filesystem;

namespace {

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

std::string error_of(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("defaults describe the random-topology sweep") {
    ExperimentSpec spec;
    CHECK(spec.generator.n == 200);
    CHECK(spec.generator.alpha == 2.5);
    CHECK(spec.power == PowerAssignment::mean());
    CHECK(spec.mode == Mode::Distributed);
    CHECK(spec.slots == 200000);
}

TEST_CASE("config parsing") {
    ExperimentSpec spec = parse_config(
        "# sweep\n"
        "mode = centralized\n"
        "gamma=0.1, 0.2,0.3\n"
        "seeds=1..3,7   # trailing comment\n"
        "\n"
        "power=uniform:2\n"
        "n=50\n"
        "slots=20000\n"
        "instance_seed=9\n");
    CHECK(spec.mode == Mode::Centralized);
    CHECK(spec.gammas == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2, 3, 7});
    CHECK(spec.power == PowerAssignment::uniform(2.0));
    CHECK(spec.generator.n == 50);
    CHECK(spec.slots == 20000);
    CHECK(spec.instance_seed == 9u);
}

TEST_CASE("config errors name the line and the key") {
    CHECK(error_of("mode=distributed\ngamma=1.5\n").find("line 2: 'gamma'") != std::string::npos);
    CHECK(error_of("colour=blue\n").find("line 1: 'colour': unknown key") != std::string::npos);
    CHECK(error_of("n=10\ngamma\n").find("line 2") != std::string::npos);
    CHECK(error_of("slots=500\n").find("'slots'") != std::string::npos);
    CHECK(error_of("beta=0.5\n").find("'beta'") != std::string::npos);
    CHECK(error_of("seeds=5..2\n").find("'seeds'") != std::string::npos);
    CHECK(error_of("mode=psychic\n").find("'mode'") != std::string::npos);
    CHECK(error_of("sense=imperfect\n").find("'sense'") != std::string::npos);
    CHECK(error_of("l_min=5\nl_max=2\n").find("'l_max'") != std::string::npos);
    CHECK(error_of("gamma=0\n").empty());
}

TEST_CASE("canonical config round-trips") {
    ExperimentSpec spec = parse_config("gamma=0.1,0.7\nseeds=2..4\npower=linear\nnoise=1e-07\ntheta_c=0.5\n");
    const std::string text = serialize_config(spec);
    CHECK(parse_config(text) == spec);
    CHECK(serialize_config(parse_config(text)) == text);
    CHECK(serialize_config(ExperimentSpec{}).find("gamma=0.2\n") != std::string::npos);
}

TEST_CASE("a zero-load sweep writes its files") {
    TempDir tmp("sinrsched_test_sweep");
    ExperimentSpec spec = parse_config("n=15\ngamma=0,0.05\nseeds=1,2\nslots=10000\nstride=7\njobs=2\n");
    spec.out_dir = tmp.path.string();
    ExperimentResult res = run_experiment(spec);
    REQUIRE(res.rows.size() == 4);
    for (const SummaryRow& r : res.rows) {
        if (r.gamma == 0.0) {
            CHECK(r.final_max_queue == 0);
            CHECK(r.stable);
            CHECK(r.delivered_fraction == 1.0);
        }
        CHECK(r.trace_rows == 1429);  // ceil(10000 / 7)
        CHECK(count_lines(tmp.path / r.trace_file) == r.trace_rows + 1);
        const std::string cell = cell_name(r.gamma, r.seed);
        CHECK(fs::exists(tmp.path / ("periods_" + cell + ".csv")));
        CHECK(fs::exists(tmp.path / ("instance_" + cell + ".txt")));
        CHECK(fs::exists(tmp.path / ("rates_" + cell + ".txt")));
    }
    CHECK(count_lines(tmp.path / "summary.csv") == 5);
    CHECK(res.stable_threshold.has_value());
}

TEST_CASE("cells are reproducible") {
    ExperimentSpec spec = parse_config("n=20\nslots=10000\nmode=centralized\n");
    CellResult a = run_cell(spec, 0.4, 3);
    CellResult b = run_cell(spec, 0.4, 3);
    CHECK(a.row == b.row);
    CHECK(a.trace == b.trace);
}

TEST_CASE("instances with dead links are rejected") {
    ExperimentSpec spec = parse_config("n=10\nnoise=1\npower=uniform\nslots=10000\n");
    CHECK_THROWS_AS(cell_instance(spec, 1), InstanceRejected);
    CHECK_THROWS_AS(run_cell(spec, 0.1, 1), InstanceRejected);
}

TEST_CASE("stable threshold") {
    auto row = [](double g, std::uint64_t s, bool stable) {
        SummaryRow r;
        r.gamma = g;
        r.seed = s;
        r.stable = stable;
        return r;
    };
    CHECK(stable_threshold({row(0.1, 1, true), row(0.1, 2, true), row(0.2, 1, true), row(0.2, 2, false)}) == 0.1);
    CHECK_FALSE(stable_threshold({row(0.1, 1, false)}).has_value());
    CHECK(stable_threshold({row(0.3, 1, true), row(0.5, 1, true)}) == 0.5);
}

TEST_CASE("summary CSV") {
    SummaryRow r;
    r.gamma = 0.2;
    r.seed = 4;
    r.final_max_queue = 17;
    r.stable = false;
    r.slope = 6.5;
    r.delivered_fraction = 0.5;
    r.trace_file = "trace_g0.2_s4.csv";
    r.trace_rows = 100;
    std::ostringstream out;
    write_summary_csv(out, {r});
    CHECK(out.str() ==
          "gamma,seed,mode,final_max_queue,stable,slope,delivered_fraction,trace_file,trace_rows\n"
          "0.2,4,distributed,17,unstable,6.5,0.5,trace_g0.2_s4.csv,100\n");
    CHECK(cell_name(0.25, 3) == "g0.25_s3");
}
