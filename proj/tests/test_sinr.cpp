#include "sinrsched/rng.hpp"
#include "sinrsched/sinr.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace sinrsched;

namespace {

Link make_link(LinkId id, Point s, Point r) { return Link{id, s, r}; }

// Link 0 at the origin pointing right with length 1, plus senders of other
// unit links placed at distance 2 from its receiver.
Instance quarter_instance() {
    return Instance({make_link(0, {0, 0}, {1, 0}), make_link(1, {3, 0}, {4, 0}),
                     make_link(2, {1, 2}, {1, 3})},
                    2.0, 1.0, 0.0);
}

std::vector<LinkId> random_subset(RngStream& rng, std::size_t n, std::size_t max_size) {
    std::vector<LinkId> ids(n);
    std::iota(ids.begin(), ids.end(), LinkId{0});
    for (std::size_t i = n; i > 1; --i) std::swap(ids[i - 1], ids[rng.next_u64() % i]);
    ids.resize(1 + rng.next_u64() % std::min(n, max_size));
    return ids;
}

// Exhaustive avgA straight from the definition.
double brute_avg_affectance(const std::vector<LinkId>& r, const AffectanceMatrix& m) {
    double best = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << r.size()); ++mask) {
        double sum = 0.0;
        int size = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!(mask >> i & 1)) continue;
            ++size;
            for (std::size_t j = 0; j < r.size(); ++j) {
                if (mask >> j & 1) sum += m(r[i], r[j]);
            }
        }
        best = std::max(best, sum / size);
    }
    return best;
}

}  // namespace

TEST_CASE("power assignments") {
    Link four = make_link(0, {0, 0}, {4, 0});
    Link two = make_link(0, {0, 0}, {0, 2});
    CHECK(power(PowerAssignment::mean(), four, 2.0) == doctest::Approx(4.0));
    CHECK(power(PowerAssignment::uniform(3.0), four, 2.0) == 3.0);
    CHECK(power(PowerAssignment::uniform(3.0), two, 5.0) == 3.0);
    CHECK(power(PowerAssignment::linear(), two, 3.0) == doctest::Approx(8.0));
    CHECK(power(PowerAssignment::custom({0.5}), two, 3.0) == 0.5);
    CHECK_THROWS(PowerAssignment::uniform(0.0));
    CHECK_THROWS(PowerAssignment::custom({1.0, -1.0}));
}

TEST_CASE("power assignment parsing") {
    CHECK(PowerAssignment::parse("mean") == PowerAssignment::mean());
    CHECK(PowerAssignment::parse("linear") == PowerAssignment::linear());
    CHECK(PowerAssignment::parse("uniform") == PowerAssignment::uniform(1.0));
    CHECK(PowerAssignment::parse("uniform:2.5") == PowerAssignment::uniform(2.5));
    CHECK_THROWS(PowerAssignment::parse("uniform:abc"));
    CHECK_THROWS(PowerAssignment::parse("max"));
}

TEST_CASE("affectance") {
    Instance inst = quarter_instance();
    auto pa = PowerAssignment::uniform(1.0);

    CHECK(affectance(inst.link(0), inst.link(0), pa, inst) == 0.0);
    // min{1, 1 * 1 * (1/2)^2}
    CHECK(affectance(inst.link(1), inst.link(0), pa, inst) == doctest::Approx(0.25).epsilon(1e-12));

    SUBCASE("sender on the receiver saturates") {
        Instance hit({make_link(0, {0, 0}, {1, 0}), make_link(1, {1, 0}, {1, 5})}, 2.0, 1.0, 0.0);
        CHECK(affectance(hit.link(1), hit.link(0), pa, hit) == 1.0);
        CHECK(std::isinf(raw_affectance(hit.link(1), hit.link(0), pa, hit)));
    }

    SUBCASE("noise raises the constant") {
        // c = beta / (1 - beta N l^alpha / P) = 1 / (1 - 0.5) = 2
        Instance noisy({make_link(0, {0, 0}, {1, 0}), make_link(1, {3, 0}, {4, 0})}, 2.0, 1.0, 0.5);
        CHECK(affectance(noisy.link(1), noisy.link(0), pa, noisy) == doctest::Approx(0.5));
    }

    SUBCASE("dead link") {
        Instance dead({make_link(0, {0, 0}, {1, 0}), make_link(1, {3, 0}, {4, 0})}, 2.0, 1.0, 2.0);
        CHECK_THROWS_AS(affectance(dead.link(1), dead.link(0), pa, dead), DeadLinkError);
        CHECK(dead_links(dead, pa) == std::vector<LinkId>{0, 1});
        AffectanceMatrix m(dead, pa);
        CHECK(m.any_dead());
        CHECK_THROWS_AS(m(1, 0), DeadLinkError);
        const std::vector<LinkId> s{0};
        CHECK_FALSE(is_feasible(s, m));
        CHECK_FALSE(is_feasible(s, pa, dead));
    }
}

TEST_CASE("affectance never increases with distance") {
    auto pa = PowerAssignment::mean();
    double prev = 2.0;
    for (double d = 0.5; d < 50.0; d *= 1.3) {
        Instance inst({make_link(0, {0, 0}, {1, 0}), make_link(1, {1 + d, 0}, {1 + d, 3})}, 3.0, 1.5, 0.01);
        double a = affectance(inst.link(1), inst.link(0), pa, inst);
        CHECK(a <= prev);
        prev = a;
    }
}

TEST_CASE("affectance sums") {
    Instance inst = quarter_instance();
    auto pa = PowerAssignment::uniform(1.0);
    AffectanceMatrix m(inst, pa);
    const std::vector<LinkId> self{0};
    const std::vector<LinkId> all{0, 1, 2};
    CHECK(affectance_sum(self, 0, m) == 0.0);
    CHECK(affectance_sum(all, 0, m) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(affectance_sum(all, 0, pa, inst) == doctest::Approx(0.5).epsilon(1e-12));

    SUBCASE("matches entry-by-entry accumulation") {
        Instance big = generate_instance(GeneratorParams{40, 1, 20, 100, 2.5, 1.0, 0.0}, 4);
        AffectanceMatrix bm(big, PowerAssignment::mean());
        RngStream rng(2, "sums");
        for (int i = 0; i < 200; ++i) {
            auto s = random_subset(rng, big.size(), 40);
            LinkId target = s[rng.next_u64() % s.size()];
            double oracle = 0.0;
            for (LinkId from : s) {
                oracle += from == target ? 0.0 : std::min(1.0, bm.raw(from, target));
            }
            CHECK(std::abs(affectance_sum(s, target, bm) - oracle) <= 1e-12);
            CHECK(std::abs(affectance_sum(s, target, PowerAssignment::mean(), big) - oracle) <= 1e-12);
        }
    }
}

TEST_CASE("feasibility") {
    auto uniform = PowerAssignment::uniform(1.0);
    Instance one({make_link(0, {0, 0}, {2, 0})}, 3.0, 1.0, 0.0);
    const std::vector<LinkId> single{0};
    CHECK(is_feasible(single, uniform, one));
    CHECK(sinr_feasible(single, uniform, one));

    // Identical links on top of each other: SINR is exactly 1.
    Instance twins({make_link(0, {0, 0}, {1, 0}), make_link(1, {0, 0}, {1, 0})}, 2.0, 2.0, 0.0);
    const std::vector<LinkId> both{0, 1};
    CHECK_FALSE(sinr_feasible(both, uniform, twins));
    CHECK_FALSE(is_feasible(both, uniform, twins));
    CHECK_FALSE(is_feasible(both, AffectanceMatrix(twins, uniform)));

    Instance twins_beta1({make_link(0, {0, 0}, {1, 0}), make_link(1, {0, 0}, {1, 0})}, 2.0, 1.0, 0.0);
    CHECK(sinr_feasible(both, uniform, twins_beta1));
    CHECK(is_feasible(both, uniform, twins_beta1));

    const std::vector<LinkId> none;
    CHECK_THROWS(is_feasible(none, uniform, one));
}

TEST_CASE("affectance and SINR feasibility agree on random sets") {
    RngStream rng(17, "dual");
    const PowerAssignment kinds[] = {PowerAssignment::uniform(1.0), PowerAssignment::linear(),
                                     PowerAssignment::mean()};
    int feasible = 0, infeasible = 0;
    for (int i = 0; i < 300; ++i) {
        GeneratorParams p{5 + rng.next_u64() % 30, 1.0, 10.0, rng.uniform(10, 200),
                          rng.uniform(2.0, 5.0), rng.uniform(1.0, 2.0), rng.uniform(0.0, 1e-4)};
        Instance inst = generate_instance(p, rng.next_u64());
        const auto& pa = kinds[i % 3];
        AffectanceMatrix m(inst, pa);
        SinrArbiter arbiter(inst, pa);
        auto s = random_subset(rng, inst.size(), 6);
        const bool direct = sinr_feasible(s, pa, inst);
        CHECK(is_feasible(s, m) == direct);
        CHECK(is_feasible(s, pa, inst) == direct);
        CHECK((arbiter.successful(s).size() == s.size()) == direct);
        (direct ? feasible : infeasible)++;
    }
    CHECK(feasible > 20);
    CHECK(infeasible > 20);
}

TEST_CASE("feasible sets stay feasible under removal") {
    RngStream rng(23, "subsets");
    Instance inst = generate_instance(GeneratorParams{30, 1, 20, 150, 2.5, 1.0, 0.0}, 6);
    AffectanceMatrix m(inst, PowerAssignment::mean());
    int checked = 0;
    for (int i = 0; i < 2000 && checked < 100; ++i) {
        auto s = random_subset(rng, inst.size(), 8);
        if (!is_feasible(s, m)) continue;
        ++checked;
        for (LinkId target : s) CHECK(affectance_sum(s, target, m) <= 1.0 + kFeasibilitySlack);
        for (std::size_t drop = 0; drop < s.size() && s.size() > 1; ++drop) {
            auto smaller = s;
            smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(drop));
            CHECK(is_feasible(smaller, m));
        }
    }
    CHECK(checked == 100);
}

TEST_CASE("maximum average affectance") {
    Instance inst = quarter_instance();
    AffectanceMatrix m(inst, PowerAssignment::uniform(1.0));
    const std::vector<LinkId> single{2};
    CHECK(max_avg_affectance(single, m, AvgAffectanceMode::Exact) == 0.0);
    CHECK(max_avg_affectance(single, m, AvgAffectanceMode::Greedy) == 0.0);

    SUBCASE("asymmetric pair") {
        // Unit links facing each other across a gap D with D^2 = 1/sqrt(0.03),
        // and P_a / P_b = sqrt(3): a_a(b) = sqrt(3)/D^2 = 0.3, a_b(a) = 0.1.
        const double d = std::pow(1.0 / 0.03, 0.25);
        Instance pair({make_link(0, {0, 0}, {1, 0}), make_link(1, {d + 1, 0}, {d, 0})}, 2.0, 1.0, 0.0);
        AffectanceMatrix pm(pair, PowerAssignment::custom({std::sqrt(3.0), 1.0}));
        REQUIRE(pm(0, 1) == doctest::Approx(0.3).epsilon(1e-12));
        REQUIRE(pm(1, 0) == doctest::Approx(0.1).epsilon(1e-12));
        const std::vector<LinkId> r{0, 1};
        CHECK(brute_avg_affectance(r, pm) == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(max_avg_affectance(r, pm, AvgAffectanceMode::Exact) == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(max_avg_affectance(r, pm, AvgAffectanceMode::Greedy) == doctest::Approx(0.2).epsilon(1e-12));
    }

    SUBCASE("exact mode size limit") {
        Instance big = generate_instance(GeneratorParams{21, 1, 2, 50, 2.5, 1.0, 0.0}, 1);
        AffectanceMatrix bm(big, PowerAssignment::mean());
        std::vector<LinkId> all(21);
        std::iota(all.begin(), all.end(), LinkId{0});
        CHECK_THROWS_AS(max_avg_affectance(all, bm, AvgAffectanceMode::Exact), std::invalid_argument);
        CHECK(max_avg_affectance(all, bm, AvgAffectanceMode::Greedy) >= 0.0);
        all.pop_back();
        CHECK(max_avg_affectance(all, bm, AvgAffectanceMode::Exact) >=
              max_avg_affectance(all, bm, AvgAffectanceMode::Greedy) - 1e-12);
    }
}

TEST_CASE("greedy peeling stays within a factor two of enumeration") {
    RngStream rng(31, "peel");
    for (int i = 0; i < 40; ++i) {
        Instance inst = generate_instance(
            GeneratorParams{12, 1, 20, rng.uniform(20, 120), 2.5, 1.0, 0.0}, rng.next_u64());
        AffectanceMatrix m(inst, PowerAssignment::mean());
        auto r = random_subset(rng, 12, 12);
        const double oracle = brute_avg_affectance(r, m);
        const double exact = max_avg_affectance(r, m, AvgAffectanceMode::Exact);
        const double greedy = max_avg_affectance(r, m, AvgAffectanceMode::Greedy);
        CHECK(exact == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(greedy <= exact + 1e-12);
        CHECK(greedy >= exact / 2 - 1e-12);
    }
}

TEST_CASE("exact average affectance ignores link numbering") {
    Instance inst = generate_instance(GeneratorParams{10, 1, 20, 40, 2.5, 1.0, 0.0}, 12);
    auto pa = PowerAssignment::mean();
    std::vector<LinkId> all(10);
    std::iota(all.begin(), all.end(), LinkId{0});
    const double base = max_avg_affectance(all, AffectanceMatrix(inst, pa), AvgAffectanceMode::Exact);

    RngStream rng(3, "perm");
    for (int k = 0; k < 5; ++k) {
        std::vector<LinkId> perm = all;
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.next_u64() % i]);
        std::vector<Link> links;
        for (LinkId i = 0; i < perm.size(); ++i) {
            Link l = inst.link(perm[i]);
            l.id = i;
            links.push_back(l);
        }
        Instance shuffled(std::move(links), inst.alpha(), inst.beta(), inst.noise());
        const double v = max_avg_affectance(all, AffectanceMatrix(shuffled, pa), AvgAffectanceMode::Exact);
        CHECK(v == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("power classes") {
    Instance inst = generate_instance(GeneratorParams{50, 1, 20, 100, 2.5, 1.0, 0.0}, 2);
    CHECK(classify_power(PowerAssignment::mean(), inst) == PowerClass{true, true});
    CHECK(classify_power(PowerAssignment::uniform(2.0), inst) == PowerClass{true, true});
    CHECK(classify_power(PowerAssignment::linear(), inst) == PowerClass{true, true});

    Instance two({make_link(0, {0, 0}, {1, 0}), make_link(1, {0, 5}, {2, 5})}, 2.0, 1.0, 0.0);
    // Longer link gets less power: not monotone, but P/l^alpha still falls with length.
    CHECK(classify_power(PowerAssignment::custom({2.0, 1.0}), two) == PowerClass{false, true});
    // Power growing faster than l^alpha breaks sublinearity.
    CHECK(classify_power(PowerAssignment::custom({1.0, 8.0}), two) == PowerClass{true, false});
}
