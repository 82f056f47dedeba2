#pragma once

#include "sinrsched/model.hpp"
#include "sinrsched/sinr.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace sinrsched {

/// Multiset of link ids: one entry per queued packet.
struct PacketBatch {
    std::vector<LinkId> packets;

    bool empty() const { return packets.empty(); }
    std::size_t size() const { return packets.size(); }
    std::map<LinkId, std::size_t> multiplicity() const;
    std::size_t max_multiplicity() const;
};

struct ScheduledSet {
    std::vector<LinkId> links;
    std::uint64_t period = 0;

    friend bool operator==(const ScheduledSet&, const ScheduledSet&) = default;
};

/// Ordered sequence of sets, one per slot.
struct Schedule {
    std::vector<ScheduledSet> sets;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// A scheduling algorithm: partitions a packet batch into feasible sets.
class Scheduler {
public:
    virtual ~Scheduler() = default;
    virtual Schedule schedule(const PacketBatch& batch, std::uint64_t period) const = 0;
};

/// First-fit over packets in decreasing link length (ties: link id, then
/// packet order). A packet joins the first open set that lacks its link and
/// stays feasible with it; otherwise it opens a new set.
class GreedyScheduler final : public Scheduler {
public:
    /// `matrix` must outlive the scheduler.
    explicit GreedyScheduler(const Instance& inst, const AffectanceMatrix& matrix);

    Schedule schedule(const PacketBatch& batch, std::uint64_t period = 0) const override;

private:
    const AffectanceMatrix& matrix_;
    std::vector<double> length_;
};

Schedule schedule_greedy(const PacketBatch& batch, const PowerAssignment& pa, const Instance& inst);

/// Every set nonempty, feasible, duplicate-free, and together they cover the
/// batch exactly.
bool validate_schedule(const Schedule& s, const PacketBatch& batch, const AffectanceMatrix& m);
bool validate_schedule(const Schedule& s, const PacketBatch& batch, const PowerAssignment& pa,
                       const Instance& inst);

inline std::size_t schedule_length(const Schedule& s) { return s.sets.size(); }

}  // namespace sinrsched
