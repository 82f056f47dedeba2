#pragma once

#include "sinrsched/model.hpp"
#include "sinrsched/rng.hpp"
#include "sinrsched/scheduling.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sinrsched {

struct WeightedSet {
    std::vector<LinkId> links;
    double weight = 0.0;
};

/// Per-link Bernoulli arrival rates, optionally with the decomposition into
/// weighted feasible sets they were built from.
class RateVector {
public:
    /// Rates given directly, without a decomposition. Each rate must lie in [0, 1].
    static RateVector from_rates(std::vector<double> rates);
    /// All-zero rates for n links.
    static RateVector zero(std::size_t n);

    /// Rates induced by a decomposition: rate(l) = sum of weights of the sets holding l.
    static RateVector from_decomposition(std::size_t n, std::vector<WeightedSet> sets);

    std::size_t size() const { return rates_.size(); }
    double rate(LinkId l) const { return rates_.at(l); }
    const std::vector<double>& rates() const { return rates_; }
    const std::vector<WeightedSet>& decomposition() const { return sets_; }
    /// Sum of the decomposition weights (0 when there is none).
    double gamma() const;
    double max_rate() const;

private:
    RateVector(std::vector<double> rates, std::vector<WeightedSet> sets)
        : rates_(std::move(rates)), sets_(std::move(sets)) {}

    std::vector<double> rates_;
    std::vector<WeightedSet> sets_;
};

/// Partitions all links (one packet each) with `scheduler` into T feasible
/// sets and gives every set weight gamma / T, so each link gets rate gamma / T.
RateVector build_rate_vector(const Instance& inst, double gamma, const Scheduler& scheduler);

/// Re-checks every decomposition set for feasibility and that the stored rates
/// match the decomposition and sum to gamma.
bool audit_rate_vector(const RateVector& rv, const AffectanceMatrix& m, double gamma);

/// Header "gamma T", then one "m_i: id id ..." line per set.
void write_rate_vector(std::ostream& out, const RateVector& rv);

/// One independent Bernoulli(rate) draw per link: 1 if a packet arrived.
void sample(const RateVector& rv, RngStream& rng, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> sample(const RateVector& rv, RngStream& rng);

}  // namespace sinrsched
