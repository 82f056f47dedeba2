#include "sinrsched/sinr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace sinrsched {

PowerAssignment PowerAssignment::uniform(double level) {
    if (!(level > 0.0) || !std::isfinite(level)) {
        throw std::invalid_argument("uniform power level must be positive");
    }
    return PowerAssignment(Kind::Uniform, level, {});
}

PowerAssignment PowerAssignment::linear() { return PowerAssignment(Kind::Linear, 0.0, {}); }

PowerAssignment PowerAssignment::mean() { return PowerAssignment(Kind::Mean, 0.0, {}); }

PowerAssignment PowerAssignment::custom(std::vector<double> table) {
    for (double p : table) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("custom powers must be positive and finite");
        }
    }
    return PowerAssignment(Kind::Custom, 0.0, std::move(table));
}

PowerAssignment PowerAssignment::parse(const std::string& text) {
    if (text == "linear") return linear();
    if (text == "mean") return mean();
    if (text == "uniform") return uniform();
    if (text.rfind("uniform:", 0) == 0) {
        std::size_t used = 0;
        double level = 0.0;
        try {
            level = std::stod(text.substr(8), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size() - 8) {
            throw std::invalid_argument("bad uniform power level in '" + text + "'");
        }
        return uniform(level);
    }
    throw std::invalid_argument("unknown power assignment '" + text +
                                "' (expected uniform[:level], linear or mean)");
}

std::string PowerAssignment::to_string() const {
    switch (kind_) {
        case Kind::Uniform:
            return level_ == 1.0 ? "uniform" : "uniform:" + std::to_string(level_);
        case Kind::Linear: return "linear";
        case Kind::Mean: return "mean";
        case Kind::Custom: return "custom";
    }
    return "?";
}

double power(const PowerAssignment& pa, const Link& link, double alpha) {
    switch (pa.kind()) {
        case PowerAssignment::Kind::Uniform: return pa.level();
        case PowerAssignment::Kind::Linear: return std::pow(link.length(), alpha);
        case PowerAssignment::Kind::Mean: return std::pow(link.length(), alpha / 2.0);
        case PowerAssignment::Kind::Custom:
            if (link.id >= pa.table().size()) {
                throw std::out_of_range("custom power table has no entry for link " +
                                        std::to_string(link.id));
            }
            return pa.table()[link.id];
    }
    return 0.0;
}

bool is_dead(const Link& link, const PowerAssignment& pa, const Instance& inst) {
    double p = power(pa, link, inst.alpha());
    return p <= inst.beta() * inst.noise() * std::pow(link.length(), inst.alpha());
}

std::vector<LinkId> dead_links(const Instance& inst, const PowerAssignment& pa) {
    std::vector<LinkId> out;
    for (const Link& l : inst.links()) {
        if (is_dead(l, pa, inst)) out.push_back(l.id);
    }
    return out;
}

double raw_affectance(const Link& src, const Link& dst, const PowerAssignment& pa,
                      const Instance& inst) {
    if (src.id == dst.id) return 0.0;
    const double alpha = inst.alpha();
    const double beta = inst.beta();
    const double len = dst.length();
    const double p_dst = power(pa, dst, alpha);
    const double noise_term = beta * inst.noise() * std::pow(len, alpha) / p_dst;
    if (noise_term >= 1.0) throw DeadLinkError(dst.id);
    const double c = beta / (1.0 - noise_term);
    const double d = distance(src.sender, dst.receiver);
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    return c * (power(pa, src, alpha) / p_dst) * std::pow(len / d, alpha);
}

double affectance(const Link& src, const Link& dst, const PowerAssignment& pa,
                  const Instance& inst) {
    return std::min(1.0, raw_affectance(src, dst, pa, inst));
}

AffectanceMatrix::AffectanceMatrix(const Instance& inst, const PowerAssignment& pa)
    : n_(inst.size()), raw_(n_ * n_, 0.0), dead_(n_, 0) {
    for (LinkId onto = 0; onto < n_; ++onto) {
        const Link& dst = inst.link(onto);
        if (is_dead(dst, pa, inst)) {
            dead_[onto] = 1;
            for (LinkId from = 0; from < n_; ++from) {
                raw_[from * n_ + onto] = from == onto ? 0.0 : std::numeric_limits<double>::infinity();
            }
            continue;
        }
        for (LinkId from = 0; from < n_; ++from) {
            raw_[from * n_ + onto] = raw_affectance(inst.link(from), dst, pa, inst);
        }
    }
}

double AffectanceMatrix::operator()(LinkId from, LinkId onto) const {
    if (dead_[onto]) throw DeadLinkError(onto);
    return std::min(1.0, raw_[from * n_ + onto]);
}

bool AffectanceMatrix::any_dead() const {
    return std::any_of(dead_.begin(), dead_.end(), [](char d) { return d != 0; });
}

double affectance_sum(std::span<const LinkId> set, LinkId target, const AffectanceMatrix& m) {
    double sum = 0.0;
    for (LinkId from : set) sum += m(from, target);
    return sum;
}

double affectance_sum(std::span<const LinkId> set, LinkId target, const PowerAssignment& pa,
                      const Instance& inst) {
    double sum = 0.0;
    const Link& dst = inst.link(target);
    for (LinkId from : set) sum += affectance(inst.link(from), dst, pa, inst);
    return sum;
}

bool is_feasible(std::span<const LinkId> set, const AffectanceMatrix& m) {
    if (set.empty()) throw std::invalid_argument("feasibility of an empty set is undefined");
    for (LinkId target : set) {
        if (m.dead(target)) return false;
    }
    for (LinkId target : set) {
        double sum = 0.0;
        for (LinkId from : set) sum += m.raw(from, target);
        if (!(sum <= 1.0 + kFeasibilitySlack)) return false;
    }
    return true;
}

bool is_feasible(std::span<const LinkId> set, const PowerAssignment& pa, const Instance& inst) {
    if (set.empty()) throw std::invalid_argument("feasibility of an empty set is undefined");
    for (LinkId target : set) {
        if (is_dead(inst.link(target), pa, inst)) return false;
    }
    for (LinkId target : set) {
        double sum = 0.0;
        for (LinkId from : set) sum += raw_affectance(inst.link(from), inst.link(target), pa, inst);
        if (!(sum <= 1.0 + kFeasibilitySlack)) return false;
    }
    return true;
}

bool sinr_feasible(std::span<const LinkId> set, const PowerAssignment& pa, const Instance& inst) {
    if (set.empty()) throw std::invalid_argument("feasibility of an empty set is undefined");
    const double alpha = inst.alpha();
    for (LinkId target : set) {
        const Link& dst = inst.link(target);
        const double signal = power(pa, dst, alpha) / std::pow(dst.length(), alpha);
        double interference = 0.0;
        for (LinkId from : set) {
            if (from == target) continue;
            const Link& src = inst.link(from);
            const double d = distance(src.sender, dst.receiver);
            if (d == 0.0) return false;
            interference += power(pa, src, alpha) / std::pow(d, alpha);
        }
        if (!(signal >= inst.beta() * (1.0 - kFeasibilitySlack) * (interference + inst.noise()))) {
            return false;
        }
    }
    return true;
}

SinrArbiter::SinrArbiter(const Instance& inst, const PowerAssignment& pa)
    : n_(inst.size()),
      threshold_(inst.beta() * (1.0 - kFeasibilitySlack)),
      noise_(inst.noise()),
      signal_(n_),
      gain_(n_ * n_) {
    const double alpha = inst.alpha();
    std::vector<double> p(n_);
    for (LinkId l = 0; l < n_; ++l) p[l] = power(pa, inst.link(l), alpha);
    for (LinkId l = 0; l < n_; ++l) {
        signal_[l] = p[l] / std::pow(inst.link(l).length(), alpha);
        for (LinkId to = 0; to < n_; ++to) {
            const double d = inst.cross_distance(l, to);
            gain_[l * n_ + to] =
                d == 0.0 ? std::numeric_limits<double>::infinity() : p[l] / std::pow(d, alpha);
        }
    }
}

std::vector<LinkId> SinrArbiter::successful(std::span<const LinkId> transmitters) const {
    std::vector<LinkId> out;
    for (LinkId target : transmitters) {
        double interference = 0.0;
        for (LinkId from : transmitters) {
            if (from != target) interference += gain_[from * n_ + target];
        }
        if (signal_[target] >= threshold_ * (interference + noise_)) out.push_back(target);
    }
    return out;
}

namespace {

// Symmetrised weights w(u, v) = a_u(v) + a_v(u) over the members of `set`.
std::vector<double> pair_weights(std::span<const LinkId> set, const AffectanceMatrix& m) {
    const std::size_t k = set.size();
    std::vector<double> w(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double v = m(set[i], set[j]) + m(set[j], set[i]);
            w[i * k + j] = v;
            w[j * k + i] = v;
        }
    }
    return w;
}

double exact_avg_affectance(std::span<const LinkId> set, const AffectanceMatrix& m) {
    const std::size_t k = set.size();
    if (k > kExactAvgAffectanceLimit) {
        throw std::invalid_argument("exact maximum average affectance is limited to " +
                                    std::to_string(kExactAvgAffectanceLimit) + " links");
    }
    const auto w = pair_weights(set, m);
    const std::uint32_t full = std::uint32_t{1} << k;
    std::vector<double> total(full, 0.0);
    double best = 0.0;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        const int low = std::countr_zero(mask);
        const std::uint32_t rest = mask & (mask - 1);
        double t = total[rest];
        for (std::uint32_t r = rest; r != 0; r &= r - 1) {
            t += w[static_cast<std::size_t>(low) * k + std::countr_zero(r)];
        }
        total[mask] = t;
        best = std::max(best, t / std::popcount(mask));
    }
    return best;
}

double greedy_avg_affectance(std::span<const LinkId> set, const AffectanceMatrix& m) {
    const std::size_t k = set.size();
    const auto w = pair_weights(set, m);
    std::vector<double> degree(k, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) degree[i] += w[i * k + j];
        total += degree[i];
    }
    total /= 2.0;

    std::vector<char> alive(k, 1);
    double best = total / static_cast<double>(k);
    for (std::size_t remaining = k; remaining > 1; --remaining) {
        std::size_t victim = k;
        for (std::size_t i = 0; i < k; ++i) {
            if (alive[i] && (victim == k || degree[i] < degree[victim])) victim = i;
        }
        alive[victim] = 0;
        total -= degree[victim];
        for (std::size_t j = 0; j < k; ++j) {
            if (alive[j]) degree[j] -= w[victim * k + j];
        }
        best = std::max(best, total / static_cast<double>(remaining - 1));
    }
    return best;
}

}  // namespace

double max_avg_affectance(std::span<const LinkId> set, const AffectanceMatrix& m,
                          AvgAffectanceMode mode) {
    if (set.empty()) throw std::invalid_argument("maximum average affectance of an empty set");
    return mode == AvgAffectanceMode::Exact ? exact_avg_affectance(set, m)
                                            : greedy_avg_affectance(set, m);
}

PowerClass classify_power(const PowerAssignment& pa, const Instance& inst) {
    constexpr double tol = 1e-9;
    const double alpha = inst.alpha();
    const std::size_t n = inst.size();
    std::vector<double> len(n), p(n), density(n);
    for (LinkId l = 0; l < n; ++l) {
        len[l] = inst.link(l).length();
        p[l] = power(pa, inst.link(l), alpha);
        density[l] = p[l] / std::pow(len[l], alpha);
    }
    PowerClass out{true, true};
    for (LinkId v = 0; v < n; ++v) {
        for (LinkId w = 0; w < n; ++w) {
            if (len[v] < len[w]) continue;
            if (p[v] < p[w] * (1.0 - tol)) out.length_monotone = false;
            if (density[v] > density[w] * (1.0 + tol)) out.sublinear = false;
        }
    }
    return out;
}

}  // namespace sinrsched
