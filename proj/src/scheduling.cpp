#include "sinrsched/scheduling.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sinrsched {

std::map<LinkId, std::size_t> PacketBatch::multiplicity() const {
    std::map<LinkId, std::size_t> m;
    for (LinkId l : packets) ++m[l];
    return m;
}

std::size_t PacketBatch::max_multiplicity() const {
    std::size_t best = 0;
    for (const auto& [link, count] : multiplicity()) best = std::max(best, count);
    return best;
}

GreedyScheduler::GreedyScheduler(const Instance& inst, const AffectanceMatrix& matrix)
    : matrix_(matrix), length_(inst.size()) {
    if (matrix.size() != inst.size()) {
        throw std::invalid_argument("affectance matrix does not match the instance");
    }
    for (LinkId l = 0; l < inst.size(); ++l) length_[l] = inst.link(l).length();
}

namespace {

// A set under construction, with each member's accumulated uncapped
// affectance so that a candidate can be tested in O(|set|).
struct OpenSet {
    std::vector<LinkId> links;
    std::vector<double> load;
};

bool fits(const OpenSet& set, LinkId cand, const AffectanceMatrix& m) {
    double own = 0.0;
    for (std::size_t i = 0; i < set.links.size(); ++i) {
        const LinkId member = set.links[i];
        if (member == cand) return false;
        if (!(set.load[i] + m.raw(cand, member) <= 1.0 + kFeasibilitySlack)) return false;
        own += m.raw(member, cand);
    }
    return own <= 1.0 + kFeasibilitySlack;
}

void add(OpenSet& set, LinkId cand, const AffectanceMatrix& m) {
    double own = 0.0;
    for (std::size_t i = 0; i < set.links.size(); ++i) {
        set.load[i] += m.raw(cand, set.links[i]);
        own += m.raw(set.links[i], cand);
    }
    set.links.push_back(cand);
    set.load.push_back(own);
}

}  // namespace

Schedule GreedyScheduler::schedule(const PacketBatch& batch, std::uint64_t period) const {
    const std::size_t n = length_.size();
    for (LinkId l : batch.packets) {
        if (l >= n) throw std::out_of_range("batch references unknown link " + std::to_string(l));
        if (matrix_.dead(l)) throw DeadLinkError(l);
    }

    std::vector<std::size_t> order(batch.packets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const LinkId la = batch.packets[a];
        const LinkId lb = batch.packets[b];
        if (length_[la] != length_[lb]) return length_[la] > length_[lb];
        return la < lb;
    });

    std::vector<OpenSet> open;
    for (std::size_t idx : order) {
        const LinkId l = batch.packets[idx];
        auto it = std::find_if(open.begin(), open.end(),
                               [&](const OpenSet& s) { return fits(s, l, matrix_); });
        if (it == open.end()) {
            open.emplace_back();
            it = std::prev(open.end());
        }
        add(*it, l, matrix_);
    }

    Schedule out;
    out.sets.reserve(open.size());
    for (auto& s : open) out.sets.push_back(ScheduledSet{std::move(s.links), period});
    return out;
}

Schedule schedule_greedy(const PacketBatch& batch, const PowerAssignment& pa, const Instance& inst) {
    AffectanceMatrix m(inst, pa);
    return GreedyScheduler(inst, m).schedule(batch);
}

bool validate_schedule(const Schedule& s, const PacketBatch& batch, const AffectanceMatrix& m) {
    std::map<LinkId, std::size_t> seen;
    for (const ScheduledSet& set : s.sets) {
        if (set.links.empty()) return false;
        std::vector<LinkId> sorted = set.links;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
        if (sorted.back() >= m.size()) return false;
        if (!is_feasible(set.links, m)) return false;
        for (LinkId l : set.links) ++seen[l];
    }
    return seen == batch.multiplicity();
}

bool validate_schedule(const Schedule& s, const PacketBatch& batch, const PowerAssignment& pa,
                       const Instance& inst) {
    return validate_schedule(s, batch, AffectanceMatrix(inst, pa));
}

}  // namespace sinrsched
