#include "sinrsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>

namespace sinrsched {

std::string to_string(Mode mode) {
    return mode == Mode::Centralized ? "centralized" : "distributed";
}

Mode parse_mode(const std::string& text) {
    if (text == "centralized") return Mode::Centralized;
    if (text == "distributed") return Mode::Distributed;
    throw std::invalid_argument("unknown mode '" + text + "' (expected centralized or distributed)");
}

std::size_t default_theta(std::size_t n, double c) {
    const double lg = std::log2(static_cast<double>(std::max<std::size_t>(n, 1)));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c * lg * lg)));
}

void ScriptedArrivals::draw(std::uint64_t slot, std::vector<std::uint8_t>& out) {
    out.assign(n_, 0);
    auto it = script_.find(slot);
    if (it == script_.end()) return;
    for (LinkId l : it->second) out.at(l) = 1;
}

BackoffState::BackoffState(std::size_t network_size)
    : n_(network_size), slots_left_(phase_length(0, network_size)) {}

double BackoffState::probability() const { return std::ldexp(0.25, -static_cast<int>(phase_)); }

std::uint64_t BackoffState::phase_length(unsigned phase, std::size_t network_size) {
    const double q = std::ldexp(0.25, -static_cast<int>(phase));
    const double len = std::ceil(8.0 * std::log(static_cast<double>(network_size)) / q);
    constexpr double cap = static_cast<double>(std::uint64_t{1} << 62);
    if (!(len < cap)) return std::uint64_t{1} << 62;
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(len));
}

bool BackoffState::attempt(RngStream& rng) {
    const bool transmit = rng.bernoulli(probability());
    if (--slots_left_ == 0) {
        ++phase_;
        slots_left_ = phase_length(phase_, n_);
    }
    return transmit;
}

void BackoffState::reset() {
    phase_ = 0;
    slots_left_ = phase_length(0, n_);
}

std::vector<LinkId> length_order(const Instance& inst) {
    std::vector<LinkId> order(inst.size());
    std::iota(order.begin(), order.end(), LinkId{0});
    std::vector<double> len(inst.size());
    for (LinkId l = 0; l < inst.size(); ++l) len[l] = inst.link(l).length();
    std::sort(order.begin(), order.end(), [&](LinkId a, LinkId b) {
        return len[a] != len[b] ? len[a] < len[b] : a < b;
    });
    return order;
}

namespace {

// Accumulates A+(l) over a period, one arrival at a time.
class OutAffectanceAccumulator {
public:
    OutAffectanceAccumulator(const Instance& inst, const AffectanceMatrix& m)
        : m_(m), order_(length_order(inst)), rank_(inst.size()), total_(inst.size(), 0.0) {
        for (std::size_t r = 0; r < order_.size(); ++r) rank_[order_[r]] = r;
    }

    void add_arrival(LinkId longer, std::vector<double>& into) const {
        for (std::size_t r = 0; r < rank_[longer]; ++r) {
            const LinkId l = order_[r];
            into[l] += m_(l, longer);
        }
    }

    void add_slot(const std::vector<std::uint8_t>& arrivals) {
        for (LinkId l = 0; l < arrivals.size(); ++l) {
            if (arrivals[l]) add_arrival(l, total_);
        }
    }

    double take_max() {
        double best = 0.0;
        for (double& v : total_) {
            best = std::max(best, v);
            v = 0.0;
        }
        return best;
    }

private:
    const AffectanceMatrix& m_;
    std::vector<LinkId> order_;
    std::vector<std::size_t> rank_;
    std::vector<double> total_;
};

struct QueuedPacket {
    std::uint64_t arrival_slot;
    std::uint64_t generation;
    std::size_t log_index;
};

void require_live(const AffectanceMatrix& m) {
    for (LinkId l = 0; l < m.size(); ++l) {
        if (m.dead(l)) throw DeadLinkError(l);
    }
}

void check_config(const SimConfig& cfg, Mode expected) {
    if (cfg.mode != expected) {
        throw std::invalid_argument("simulation config mode is " + to_string(cfg.mode) +
                                    ", expected " + to_string(expected));
    }
    if (cfg.theta < 1) throw std::invalid_argument("theta must be >= 1");
    if (cfg.total_slots < cfg.theta) throw std::invalid_argument("total_slots must be >= theta");
}

// Shared per-link FIFO queues plus the running totals every mode records.
class QueueBook {
public:
    QueueBook(std::size_t n, bool record) : queues_(n), record_(record) {}

    void arrive(LinkId l, std::uint64_t slot, std::uint64_t generation, Trace& trace) {
        std::size_t idx = 0;
        if (record_) {
            idx = trace.packets.size();
            trace.packets.push_back(PacketRecord{l, slot, generation, 0, 0});
        }
        queues_[l].push_back(QueuedPacket{slot, generation, idx});
        ++arrived_;
    }

    QueuedPacket deliver(LinkId l, std::uint64_t slot, unsigned phase, Trace& trace) {
        if (queues_[l].empty()) {
            throw InvariantViolation("slot " + std::to_string(slot) + ": link " +
                                     std::to_string(l) + " transmitted with an empty queue");
        }
        QueuedPacket p = queues_[l].front();
        queues_[l].pop_front();
        if (record_) {
            trace.packets[p.log_index].delivery_slot = slot;
            trace.packets[p.log_index].phase = phase;
        }
        ++delivered_;
        return p;
    }

    const std::deque<QueuedPacket>& queue(LinkId l) const { return queues_[l]; }
    std::size_t size() const { return queues_.size(); }

    SlotRecord record(std::uint64_t slot, std::uint64_t delivered_now) const {
        SlotRecord r;
        r.slot = slot;
        r.delivered = delivered_now;
        r.delivered_cum = delivered_;
        r.arrived_cum = arrived_;
        for (const auto& q : queues_) {
            r.total_queue += q.size();
            r.max_queue = std::max<std::uint64_t>(r.max_queue, q.size());
        }
        if (r.arrived_cum != r.delivered_cum + r.total_queue) {
            throw InvariantViolation("slot " + std::to_string(slot) +
                                     ": arrivals != deliveries + queued packets");
        }
        return r;
    }

private:
    std::vector<std::deque<QueuedPacket>> queues_;
    bool record_;
    std::uint64_t arrived_ = 0;
    std::uint64_t delivered_ = 0;
};

}  // namespace

Trace run_centralized(const Instance& inst, const AffectanceMatrix& matrix,
                      const Scheduler& scheduler, ArrivalProcess& arrivals, const SimConfig& cfg) {
    check_config(cfg, Mode::Centralized);
    require_live(matrix);
    const std::size_t n = inst.size();
    const std::uint64_t theta = cfg.theta;

    Trace trace;
    trace.mode = Mode::Centralized;
    trace.theta = cfg.theta;
    trace.slots.reserve(cfg.total_slots);

    QueueBook book(n, cfg.record_packets);
    std::deque<ScheduledSet> set_queue;
    PacketBatch pending;
    std::vector<std::uint64_t> pending_per_link(n, 0);
    std::vector<std::uint8_t> x;
    std::vector<char> in_set(n, 0);
    OutAffectanceAccumulator diag(inst, matrix);

    for (std::uint64_t t = 1; t <= cfg.total_slots; ++t) {
        const std::uint64_t period = (t - 1) / theta;
        std::uint64_t delivered_now = 0;
        std::uint64_t transmitted_now = 0;

        if (!set_queue.empty()) {
            ScheduledSet s = std::move(set_queue.front());
            set_queue.pop_front();
            for (LinkId l : s.links) {
                if (in_set[l]) {
                    throw InvariantViolation("slot " + std::to_string(t) + ": link " +
                                             std::to_string(l) + " scheduled twice in one set");
                }
                in_set[l] = 1;
            }
            for (LinkId l : s.links) in_set[l] = 0;
            if (!is_feasible(s.links, matrix)) {
                throw InvariantViolation("slot " + std::to_string(t) + ": infeasible set transmitted");
            }
            for (LinkId l : s.links) {
                book.deliver(l, t, 0, trace);
                ++delivered_now;
            }
            transmitted_now = s.links.size();
        }

        if ((t - 1) % theta == 0 && t > 1) {
            PeriodRecord rec;
            rec.period = period - 1;
            rec.batch_size = pending.size();
            if (!pending.empty()) {
                Schedule r = scheduler.schedule(pending, period - 1);
                rec.schedule_len = schedule_length(r);
                for (ScheduledSet& s : r.sets) set_queue.push_back(std::move(s));
            }
            rec.out_affectance_max = cfg.diagnostics ? diag.take_max() : 0.0;
            trace.periods.push_back(rec);
            pending.packets.clear();
            std::fill(pending_per_link.begin(), pending_per_link.end(), 0);
        }

        arrivals.draw(t, x);
        for (LinkId l = 0; l < n; ++l) {
            if (!x[l]) continue;
            book.arrive(l, t, period, trace);
            pending.packets.push_back(l);
            ++pending_per_link[l];
        }
        if (cfg.diagnostics) diag.add_slot(x);

        SlotRecord r = book.record(t, delivered_now);
        r.setqueue_or_s = set_queue.size();
        r.cur = period;
        r.transmitted = transmitted_now;
        for (LinkId l = 0; l < n; ++l) {
            if (book.queue(l).size() - pending_per_link[l] > set_queue.size()) {
                throw InvariantViolation("slot " + std::to_string(t) + ": scheduled backlog of link " +
                                         std::to_string(l) + " exceeds the set queue");
            }
        }
        trace.slots.push_back(r);
    }
    return trace;
}

Trace run_centralized(const Instance& inst, const PowerAssignment& pa, const RateVector& rv,
                      const SimConfig& cfg) {
    AffectanceMatrix m(inst, pa);
    GreedyScheduler scheduler(inst, m);
    BernoulliArrivals arrivals(rv, RngStream(cfg.seed, "arrivals"));
    return run_centralized(inst, m, scheduler, arrivals, cfg);
}

Trace run_distributed(const Instance& inst, const PowerAssignment& pa, ArrivalProcess& arrivals,
                      const SimConfig& cfg) {
    check_config(cfg, Mode::Distributed);
    AffectanceMatrix matrix(inst, pa);
    require_live(matrix);
    const std::size_t n = inst.size();
    const std::uint64_t theta = cfg.theta;
    SinrArbiter arbiter(inst, pa);
    RngStream coins(cfg.seed, "protocol");

    Trace trace;
    trace.mode = Mode::Distributed;
    trace.theta = cfg.theta;
    trace.slots.reserve(cfg.total_slots);

    QueueBook book(n, cfg.record_packets);
    std::vector<LinkProtocolState> senders(n, LinkProtocolState{BackoffState(n), 0, 0});
    std::vector<std::uint64_t> generated;  // packets per generation
    std::vector<double> out_aff_max;       // A+ maximum per generation
    std::uint64_t data_slots_on_s = 0;
    std::uint64_t s = 0;                   // common view under perfect sensing
    std::uint64_t last_generation = 0;
    std::vector<std::uint8_t> x;
    std::vector<LinkId> transmitters;
    OutAffectanceAccumulator diag(inst, matrix);

    auto active = [&](LinkId l) {
        const auto& q = book.queue(l);
        return !q.empty() && q.front().generation == senders[l].s;
    };

    for (std::uint64_t t = 1; t <= cfg.total_slots; ++t) {
        const std::uint64_t pair = (t - 1) / 2;
        const bool data_slot = (t % 2) == 1;
        const std::uint64_t cur = pair / theta;
        for (auto& st : senders) st.cur = cur;

        if (cur != last_generation) {
            out_aff_max.resize(cur, 0.0);
            out_aff_max[last_generation] = cfg.diagnostics ? diag.take_max() : 0.0;
            last_generation = cur;
        }
        if (generated.size() <= cur) generated.resize(cur + 1, 0);

        std::uint64_t delivered_now = 0;
        std::uint64_t transmitted_now = 0;
        if (data_slot) {
            transmitters.clear();
            for (LinkId l = 0; l < n; ++l) {
                if (active(l) && senders[l].backoff.attempt(coins)) transmitters.push_back(l);
                if (senders[l].backoff.probability() > 0.25) {
                    throw InvariantViolation("transmit probability above 1/4");
                }
            }
            for (LinkId l : arbiter.successful(transmitters)) {
                book.deliver(l, t, senders[l].backoff.phase(), trace);
                senders[l].backoff.reset();
                ++delivered_now;
            }
            transmitted_now = transmitters.size();
            ++data_slots_on_s;
        } else {
            for (LinkId l = 0; l < n; ++l) transmitted_now += active(l) ? 1 : 0;
            // Every sender senses the same silent/busy verdict.
            const bool silent = transmitted_now == 0;
            for (auto& st : senders) {
                if (silent && st.s < st.cur) ++st.s;
            }
            if (senders.front().s != s) {
                PeriodRecord rec;
                rec.period = s;
                rec.batch_size = generated[s];
                rec.schedule_len = data_slots_on_s;
                rec.out_affectance_max = s < out_aff_max.size() ? out_aff_max[s] : 0.0;
                trace.periods.push_back(rec);
                data_slots_on_s = 0;
                s = senders.front().s;
            }
        }

        arrivals.draw(t, x);
        for (LinkId l = 0; l < n; ++l) {
            if (!x[l]) continue;
            book.arrive(l, t, cur, trace);
            ++generated[cur];
        }
        if (cfg.diagnostics) diag.add_slot(x);

        for (const auto& st : senders) {
            if (st.s != s || st.s > st.cur) {
                throw InvariantViolation("slot " + std::to_string(t) + ": inconsistent period counters");
            }
        }
        SlotRecord r = book.record(t, delivered_now);
        r.setqueue_or_s = s;
        r.cur = cur;
        r.transmitted = transmitted_now;
        trace.slots.push_back(r);
    }
    return trace;
}

Trace run_distributed(const Instance& inst, const PowerAssignment& pa, const RateVector& rv,
                      const SimConfig& cfg) {
    BernoulliArrivals arrivals(rv, RngStream(cfg.seed, "arrivals"));
    return run_distributed(inst, pa, arrivals, cfg);
}

OutAffectance diagnostic_out_affectance(const Instance& inst, const AffectanceMatrix& matrix,
                                        std::span<const std::vector<std::uint8_t>> period_sample) {
    OutAffectanceAccumulator acc(inst, matrix);
    OutAffectance out;
    out.total.assign(inst.size(), 0.0);
    out.per_slot.reserve(period_sample.size());
    for (const auto& slot : period_sample) {
        std::vector<double> row(inst.size(), 0.0);
        for (LinkId l = 0; l < slot.size() && l < inst.size(); ++l) {
            if (slot[l]) acc.add_arrival(l, row);
        }
        for (LinkId l = 0; l < inst.size(); ++l) out.total[l] += row[l];
        out.per_slot.push_back(std::move(row));
    }
    return out;
}

StabilityEstimate estimate_stability(std::span<const double> max_queue) {
    if (max_queue.size() < kMinStabilitySlots) {
        throw std::invalid_argument("stability estimate needs at least " +
                                    std::to_string(kMinStabilitySlots) + " slots");
    }
    const std::size_t start = max_queue.size() / 2;
    const std::size_t m = max_queue.size() - start;
    // x centred at the window midpoint.
    const double mid = (static_cast<double>(m) - 1.0) / 2.0;
    double mean = 0.0;
    for (std::size_t i = start; i < max_queue.size(); ++i) mean += max_queue[i];
    mean /= static_cast<double>(m);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = static_cast<double>(i) - mid;
        sxy += dx * (max_queue[start + i] - mean);
        sxx += dx * dx;
    }
    StabilityEstimate est;
    est.slope = 1000.0 * sxy / sxx;
    est.mean_queue = mean;
    est.stable = est.slope <= kStableSlopePer1000;
    return est;
}

StabilityEstimate estimate_stability(const Trace& trace) {
    std::vector<double> q;
    q.reserve(trace.slots.size());
    for (const SlotRecord& r : trace.slots) q.push_back(static_cast<double>(r.max_queue));
    return estimate_stability(q);
}

std::string audit_trace(const Trace& trace) {
    std::uint64_t prev_s = 0, prev_cur = 0, prev_delivered = 0, prev_arrived = 0;
    for (std::size_t i = 0; i < trace.slots.size(); ++i) {
        const SlotRecord& r = trace.slots[i];
        const std::string at = "slot " + std::to_string(r.slot) + ": ";
        if (r.slot != i + 1) return at + "slot numbering gap";
        if (r.arrived_cum != r.delivered_cum + r.total_queue) return at + "conservation broken";
        if (r.delivered_cum != prev_delivered + r.delivered) return at + "delivery count mismatch";
        if (r.arrived_cum < prev_arrived) return at + "arrivals decreased";
        if (r.max_queue > r.total_queue) return at + "max queue above total";
        if (r.cur < prev_cur) return at + "period counter decreased";
        if (trace.mode == Mode::Distributed) {
            if (r.setqueue_or_s < prev_s) return at + "s decreased";
            if (r.setqueue_or_s > r.cur) return at + "s exceeds cur";
            if (r.setqueue_or_s != prev_s && r.slot % 2 != 0) return at + "s advanced outside a signaling slot";
            if (r.setqueue_or_s != prev_s && r.transmitted != 0) return at + "s advanced despite a busy tone";
            if (r.setqueue_or_s > prev_s + 1) return at + "s advanced by more than one";
            if (r.slot % 2 == 0 && r.delivered != 0) return at + "delivery in a signaling slot";
            prev_s = r.setqueue_or_s;
        }
        prev_cur = r.cur;
        prev_delivered = r.delivered_cum;
        prev_arrived = r.arrived_cum;
    }
    return {};
}

bool fifo_across_periods(const Trace& trace) {
    // Per generation: earliest and latest delivery slot, "never" if undelivered.
    std::map<std::uint64_t, std::uint64_t> first_delivery, last_delivery;
    constexpr auto never = std::numeric_limits<std::uint64_t>::max();
    for (const PacketRecord& p : trace.packets) {
        const std::uint64_t d = p.delivery_slot == 0 ? never : p.delivery_slot;
        auto [it, fresh] = first_delivery.emplace(p.generation, d);
        if (!fresh) it->second = std::min(it->second, d);
        auto [jt, fresh2] = last_delivery.emplace(p.generation, d);
        if (!fresh2) jt->second = std::max(jt->second, d);
    }
    std::uint64_t latest_before = 0;
    for (const auto& [gen, first] : first_delivery) {
        if (first != never && first <= latest_before) return false;
        latest_before = std::max(latest_before, last_delivery[gen]);
    }
    return true;
}

std::uint64_t trace_rows(const Trace& trace, std::uint64_t stride) {
    if (stride == 0) throw std::invalid_argument("stride must be >= 1");
    return (trace.slots.size() + stride - 1) / stride;
}

void write_trace_csv(std::ostream& out, const Trace& trace, std::uint64_t stride) {
    if (stride == 0) throw std::invalid_argument("stride must be >= 1");
    out << "slot,max_queue,total_queue,delivered_cum,arrived_cum,setqueue_or_s,cur\n";
    for (std::size_t i = 0; i < trace.slots.size(); i += stride) {
        const SlotRecord& r = trace.slots[i];
        out << r.slot << ',' << r.max_queue << ',' << r.total_queue << ',' << r.delivered_cum << ','
            << r.arrived_cum << ',' << r.setqueue_or_s << ',' << r.cur << '\n';
    }
}

void write_period_csv(std::ostream& out, const Trace& trace) {
    out << "period,batch_size,schedule_len\n";
    for (const PeriodRecord& p : trace.periods) {
        out << p.period << ',' << p.batch_size << ',' << p.schedule_len << '\n';
    }
}

}  // namespace sinrsched
