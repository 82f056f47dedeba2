#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sinrsched {

using LinkId = std::size_t;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Euclidean distance in the plane.
double distance(const Point& p, const Point& q);

struct Link {
    LinkId id = 0;
    Point sender;
    Point receiver;

    double length() const { return distance(sender, receiver); }

    friend bool operator==(const Link&, const Link&) = default;
};

class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A set of links together with the physical constants of the channel:
/// path-loss exponent alpha, SINR threshold beta and ambient noise.
///
/// Construction validates every invariant; an Instance that exists is well
/// formed (ids contiguous from 0, positive lengths, finite coordinates,
/// alpha > 0, beta >= 1, noise >= 0).
class Instance {
public:
    Instance(std::vector<Link> links, double alpha, double beta, double noise);

    std::size_t size() const { return links_.size(); }
    const std::vector<Link>& links() const { return links_; }
    const Link& link(LinkId id) const { return links_.at(id); }

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double noise() const { return noise_; }

    /// d(s_from, r_to): distance from one link's sender to another's receiver.
    double cross_distance(LinkId from, LinkId to) const;

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    std::vector<Link> links_;
    double alpha_;
    double beta_;
    double noise_;
};

/// Ratio of the longest to the shortest link length.
double length_diversity(const Instance& inst);

struct GeneratorParams {
    std::size_t n = 200;
    double l_min = 1.0;
    double l_max = 20.0;
    double side = 100.0;
    double alpha = 2.5;
    double beta = 1.0;
    double noise = 0.0;

    friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

/// Senders uniform in a side x side square, lengths uniform in [l_min, l_max],
/// directions uniform on the circle. Deterministic in `seed`.
Instance generate_instance(const GeneratorParams& params, std::uint64_t seed);

// Text format: header "n alpha beta noise", then one "id sx sy rx ry" line per
// link. Values are printed with 17 significant digits so a write/read cycle is
// exact.
void write_instance(std::ostream& out, const Instance& inst);
Instance read_instance(std::istream& in);
Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst);

}  // namespace sinrsched
