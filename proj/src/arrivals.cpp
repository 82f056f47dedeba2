#include "sinrsched/arrivals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sinrsched {

RateVector RateVector::from_rates(std::vector<double> rates) {
    for (double r : rates) {
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("arrival rates must lie in [0, 1]");
    }
    return RateVector(std::move(rates), {});
}

RateVector RateVector::zero(std::size_t n) { return RateVector(std::vector<double>(n, 0.0), {}); }

RateVector RateVector::from_decomposition(std::size_t n, std::vector<WeightedSet> sets) {
    std::vector<double> rates(n, 0.0);
    for (const WeightedSet& s : sets) {
        if (!(s.weight > 0.0)) throw std::invalid_argument("decomposition weights must be positive");
        for (LinkId l : s.links) {
            if (l >= n) throw std::out_of_range("decomposition references unknown link");
            rates[l] += s.weight;
        }
    }
    for (double r : rates) {
        if (r > 1.0 + 1e-12) throw std::invalid_argument("decomposition yields a rate above 1");
    }
    return RateVector(std::move(rates), std::move(sets));
}

double RateVector::gamma() const {
    double g = 0.0;
    for (const WeightedSet& s : sets_) g += s.weight;
    return g;
}

double RateVector::max_rate() const {
    return rates_.empty() ? 0.0 : *std::max_element(rates_.begin(), rates_.end());
}

RateVector build_rate_vector(const Instance& inst, double gamma, const Scheduler& scheduler) {
    if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("gamma must lie in (0, 1]");
    PacketBatch all;
    all.packets.resize(inst.size());
    for (LinkId l = 0; l < inst.size(); ++l) all.packets[l] = l;
    Schedule partition = scheduler.schedule(all, 0);

    const double weight = gamma / static_cast<double>(partition.sets.size());
    std::vector<WeightedSet> sets;
    sets.reserve(partition.sets.size());
    for (ScheduledSet& s : partition.sets) sets.push_back(WeightedSet{std::move(s.links), weight});
    return RateVector::from_decomposition(inst.size(), std::move(sets));
}

bool audit_rate_vector(const RateVector& rv, const AffectanceMatrix& m, double gamma) {
    std::vector<double> induced(rv.size(), 0.0);
    for (const WeightedSet& s : rv.decomposition()) {
        if (s.links.empty() || !is_feasible(s.links, m)) return false;
        for (LinkId l : s.links) induced[l] += s.weight;
    }
    if (std::abs(rv.gamma() - gamma) > 1e-12) return false;
    for (LinkId l = 0; l < rv.size(); ++l) {
        if (std::abs(induced[l] - rv.rate(l)) > 1e-12) return false;
        if (rv.rate(l) > gamma + 1e-12) return false;
    }
    return true;
}

void write_rate_vector(std::ostream& out, const RateVector& rv) {
    auto fmt = [](double v) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        return std::string(buf, res.ptr);
    };
    out << fmt(rv.gamma()) << ' ' << rv.decomposition().size() << '\n';
    for (const WeightedSet& s : rv.decomposition()) {
        out << fmt(s.weight) << ':';
        for (LinkId l : s.links) out << ' ' << l;
        out << '\n';
    }
}

void sample(const RateVector& rv, RngStream& rng, std::vector<std::uint8_t>& out) {
    out.resize(rv.size());
    for (LinkId l = 0; l < rv.size(); ++l) out[l] = rng.bernoulli(rv.rate(l)) ? 1 : 0;
}

std::vector<std::uint8_t> sample(const RateVector& rv, RngStream& rng) {
    std::vector<std::uint8_t> out;
    sample(rv, rng, out);
    return out;
}

}  // namespace sinrsched
