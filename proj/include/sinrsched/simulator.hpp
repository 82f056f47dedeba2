#pragma once

#include "sinrsched/arrivals.hpp"
#include "sinrsched/model.hpp"
#include "sinrsched/rng.hpp"
#include "sinrsched/scheduling.hpp"
#include "sinrsched/sinr.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sinrsched {

enum class Mode { Centralized, Distributed };
enum class CarrierSense { Perfect };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct SimConfig {
    Mode mode = Mode::Distributed;
    /// Period length: slots (centralized) or slot pairs (distributed).
    std::size_t theta = 1;
    std::uint64_t total_slots = 10000;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    CarrierSense sense = CarrierSense::Perfect;
    /// Keep a per-packet log (arrival, generation, delivery) in the trace.
    bool record_packets = false;
    /// Track the per-period maximum outgoing affectance to longer links.
    bool diagnostics = true;
};

/// ceil(c * log2(n)^2), at least 1.
std::size_t default_theta(std::size_t n, double c = 1.0);

class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SlotRecord {
    std::uint64_t slot = 0;
    std::uint64_t max_queue = 0;
    std::uint64_t total_queue = 0;
    std::uint64_t delivered = 0;
    std::uint64_t delivered_cum = 0;
    std::uint64_t arrived_cum = 0;
    /// Centralized: number of feasible sets waiting. Distributed: counter s.
    std::uint64_t setqueue_or_s = 0;
    /// Current period counter.
    std::uint64_t cur = 0;
    /// Links that transmitted: data transmissions, or busy tones in a
    /// distributed signaling slot.
    std::uint64_t transmitted = 0;

    friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

struct PeriodRecord {
    std::uint64_t period = 0;
    /// Packets generated during the period.
    std::uint64_t batch_size = 0;
    /// Centralized: sets in the period's schedule. Distributed: data slots
    /// spent while s pointed at the period.
    std::uint64_t schedule_len = 0;
    /// Largest A+(l) over links for the period's arrivals.
    double out_affectance_max = 0.0;

    friend bool operator==(const PeriodRecord&, const PeriodRecord&) = default;
};

struct PacketRecord {
    LinkId link = 0;
    std::uint64_t arrival_slot = 0;
    std::uint64_t generation = 0;
    /// 0 while undelivered.
    std::uint64_t delivery_slot = 0;
    /// Distributed mode: backoff phase k at delivery.
    unsigned phase = 0;

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

struct Trace {
    Mode mode = Mode::Distributed;
    std::size_t theta = 1;
    std::vector<SlotRecord> slots;
    std::vector<PeriodRecord> periods;
    std::vector<PacketRecord> packets;

    friend bool operator==(const Trace&, const Trace&) = default;
};

/// Source of per-slot packet arrivals (one 0/1 entry per link).
class ArrivalProcess {
public:
    virtual ~ArrivalProcess() = default;
    virtual void draw(std::uint64_t slot, std::vector<std::uint8_t>& out) = 0;
};

class BernoulliArrivals final : public ArrivalProcess {
public:
    BernoulliArrivals(const RateVector& rv, RngStream rng) : rv_(rv), rng_(std::move(rng)) {}
    void draw(std::uint64_t, std::vector<std::uint8_t>& out) override { sample(rv_, rng_, out); }

private:
    const RateVector& rv_;
    RngStream rng_;
};

/// Fixed arrivals: slot -> links receiving a packet in that slot.
class ScriptedArrivals final : public ArrivalProcess {
public:
    ScriptedArrivals(std::size_t n, std::map<std::uint64_t, std::vector<LinkId>> script)
        : n_(n), script_(std::move(script)) {}
    void draw(std::uint64_t slot, std::vector<std::uint8_t>& out) override;

private:
    std::size_t n_;
    std::map<std::uint64_t, std::vector<LinkId>> script_;
};

/// Exponential backoff for one packet: phase k transmits with probability
/// 1/(4 * 2^k) per slot for ceil(8 ln n / q) slots, then moves to phase k + 1.
class BackoffState {
public:
    explicit BackoffState(std::size_t network_size);

    unsigned phase() const { return phase_; }
    double probability() const;
    std::uint64_t slots_left() const { return slots_left_; }

    /// Runs one slot of the current phase; returns whether to transmit.
    bool attempt(RngStream& rng);
    /// Back to phase 0 for a fresh packet.
    void reset();

    /// Phase length in slots; at least 1 (ln 1 = 0 for a one-link network).
    static std::uint64_t phase_length(unsigned phase, std::size_t network_size);

private:
    std::size_t n_;
    unsigned phase_ = 0;
    std::uint64_t slots_left_;
};

/// State of one sender in distributed mode.
struct LinkProtocolState {
    BackoffState backoff;
    std::uint64_t cur = 0;
    std::uint64_t s = 0;
};

/// Batches each period's arrivals, schedules them with `scheduler` and
/// transmits one queued feasible set per slot, oldest period first.
Trace run_centralized(const Instance& inst, const AffectanceMatrix& matrix,
                      const Scheduler& scheduler, ArrivalProcess& arrivals, const SimConfig& cfg);
/// Greedy scheduler with Bernoulli arrivals drawn from `rv` seeded by cfg.seed.
Trace run_centralized(const Instance& inst, const PowerAssignment& pa, const RateVector& rv,
                      const SimConfig& cfg);

/// Slots alternate data/signaling. In a data slot every sender whose head
/// packet belongs to period s flips its backoff coin; the SINR arbiter decides
/// which transmissions succeed. In a signaling slot those senders emit a busy
/// tone; a silent slot advances s (while s < cur).
Trace run_distributed(const Instance& inst, const PowerAssignment& pa, ArrivalProcess& arrivals,
                      const SimConfig& cfg);
Trace run_distributed(const Instance& inst, const PowerAssignment& pa, const RateVector& rv,
                      const SimConfig& cfg);

/// Links ordered by (length, id), shortest first. "l' >= l" in the outgoing
/// affectance diagnostic refers to this order.
std::vector<LinkId> length_order(const Instance& inst);

struct OutAffectance {
    /// per_slot[t][l] = sum over longer l' of a_l(l') * X_l'(t).
    std::vector<std::vector<double>> per_slot;
    /// total[l] = A+(l), the sum over the period's slots.
    std::vector<double> total;
};

OutAffectance diagnostic_out_affectance(const Instance& inst, const AffectanceMatrix& matrix,
                                        std::span<const std::vector<std::uint8_t>> period_sample);

struct StabilityEstimate {
    bool stable = true;
    /// Least-squares slope of the max queue over the trace's second half, in
    /// packets per 1000 slots.
    double slope = 0.0;
    /// Mean max queue over the same window.
    double mean_queue = 0.0;
};

inline constexpr std::uint64_t kMinStabilitySlots = 10000;
inline constexpr double kStableSlopePer1000 = 0.01;

StabilityEstimate estimate_stability(const Trace& trace);
StabilityEstimate estimate_stability(std::span<const double> max_queue);

/// Conservation, monotone counters and (distributed) s <= cur, checked over a
/// finished trace. Returns an empty string when all hold, else a description.
std::string audit_trace(const Trace& trace);
/// No packet of period q + 1 delivered before every packet of period q.
bool fifo_across_periods(const Trace& trace);

std::uint64_t trace_rows(const Trace& trace, std::uint64_t stride);
void write_trace_csv(std::ostream& out, const Trace& trace, std::uint64_t stride = 1);
void write_period_csv(std::ostream& out, const Trace& trace);

}  // namespace sinrsched
