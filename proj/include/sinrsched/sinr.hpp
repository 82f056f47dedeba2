#pragma once

#include "sinrsched/model.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sinrsched {

/// Rule mapping a link to its transmission power.
class PowerAssignment {
public:
    enum class Kind { Uniform, Linear, Mean, Custom };

    static PowerAssignment uniform(double level = 1.0);
    static PowerAssignment linear();
    static PowerAssignment mean();
    /// Per-link table indexed by link id.
    static PowerAssignment custom(std::vector<double> table);

    /// Parses "uniform", "uniform:<level>", "linear", "mean".
    static PowerAssignment parse(const std::string& text);

    Kind kind() const { return kind_; }
    double level() const { return level_; }
    const std::vector<double>& table() const { return table_; }

    std::string to_string() const;

    friend bool operator==(const PowerAssignment&, const PowerAssignment&) = default;

private:
    PowerAssignment(Kind kind, double level, std::vector<double> table)
        : kind_(kind), level_(level), table_(std::move(table)) {}

    Kind kind_;
    double level_;
    std::vector<double> table_;
};

double power(const PowerAssignment& pa, const Link& link, double alpha);

/// A link whose power cannot overcome noise alone (P_l <= beta * N * l^alpha).
class DeadLinkError : public std::runtime_error {
public:
    explicit DeadLinkError(LinkId link)
        : std::runtime_error("link " + std::to_string(link) + " cannot meet the SINR threshold even alone"),
          link_(link) {}
    LinkId link() const { return link_; }

private:
    LinkId link_;
};

bool is_dead(const Link& link, const PowerAssignment& pa, const Instance& inst);
std::vector<LinkId> dead_links(const Instance& inst, const PowerAssignment& pa);

/// Interference of `src` on `dst` relative to the signal `dst` receives, before
/// the cap at 1. Summing these over a set and comparing against 1 is exactly the
/// SINR condition for `dst`. Throws DeadLinkError when `dst` is dead.
double raw_affectance(const Link& src, const Link& dst, const PowerAssignment& pa,
                      const Instance& inst);

/// min(1, raw_affectance); 0 when src == dst.
double affectance(const Link& src, const Link& dst, const PowerAssignment& pa,
                  const Instance& inst);

/// Pairwise affectances of an instance under one power assignment, computed
/// once. Entry (from, onto) is the affectance caused by `from` on `onto`.
class AffectanceMatrix {
public:
    AffectanceMatrix(const Instance& inst, const PowerAssignment& pa);

    std::size_t size() const { return n_; }

    /// Capped affectance in [0, 1].
    double operator()(LinkId from, LinkId onto) const;
    /// Uncapped affectance; +inf when the sender sits on the receiver.
    double raw(LinkId from, LinkId onto) const { return raw_[from * n_ + onto]; }

    bool dead(LinkId l) const { return dead_[l] != 0; }
    bool any_dead() const;

private:
    std::size_t n_;
    std::vector<double> raw_;
    std::vector<char> dead_;
};

inline constexpr double kFeasibilitySlack = 1e-12;

/// Sum of the capped affectances of `set` onto `target`. The target's own
/// entry (if present) contributes 0. Throws DeadLinkError for a dead target.
double affectance_sum(std::span<const LinkId> set, LinkId target, const AffectanceMatrix& m);
double affectance_sum(std::span<const LinkId> set, LinkId target, const PowerAssignment& pa,
                      const Instance& inst);

/// SINR feasibility decided through affectances: every member's uncapped
/// affectance sum must stay within 1 (+1e-12). Sets containing a dead link are
/// infeasible. `set` must be nonempty and hold distinct ids.
bool is_feasible(std::span<const LinkId> set, const AffectanceMatrix& m);
bool is_feasible(std::span<const LinkId> set, const PowerAssignment& pa, const Instance& inst);

/// SINR feasibility checked straight from received powers:
/// P_l / l^alpha >= beta * (1 - 1e-12) * (interference + N) for every member.
bool sinr_feasible(std::span<const LinkId> set, const PowerAssignment& pa, const Instance& inst);

/// Decides which of a set of simultaneous transmitters get through, by
/// evaluating the SINR condition for each one against all the others.
class SinrArbiter {
public:
    SinrArbiter(const Instance& inst, const PowerAssignment& pa);

    /// Subset of `transmitters` (in input order) whose SINR meets beta.
    std::vector<LinkId> successful(std::span<const LinkId> transmitters) const;

private:
    std::size_t n_;
    double threshold_;
    double noise_;
    std::vector<double> signal_;
    std::vector<double> gain_;  // gain_[from * n + to] = P_from / d(s_from, r_to)^alpha
};

enum class AvgAffectanceMode { Greedy, Exact };

inline constexpr std::size_t kExactAvgAffectanceLimit = 20;

/// Maximum over nonempty Q of R of (1/|Q|) * sum of affectances among Q.
///
/// Exact mode enumerates every subset and rejects |R| > 20. Greedy mode peels
/// the link of minimum incident affectance one at a time and keeps the best
/// average seen, which is always at least half the exact value.
double max_avg_affectance(std::span<const LinkId> set, const AffectanceMatrix& m,
                          AvgAffectanceMode mode);

struct PowerClass {
    bool length_monotone = false;
    bool sublinear = false;

    friend bool operator==(const PowerClass&, const PowerClass&) = default;
};

PowerClass classify_power(const PowerAssignment& pa, const Instance& inst);

}  // namespace sinrsched
