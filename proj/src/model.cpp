#include "sinrsched/model.hpp"

#include "sinrsched/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sinrsched {

double distance(const Point& p, const Point& q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

Instance::Instance(std::vector<Link> links, double alpha, double beta, double noise)
    : links_(std::move(links)), alpha_(alpha), beta_(beta), noise_(noise) {
    if (links_.empty()) throw InstanceError("instance has no links");
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw InstanceError("alpha must be > 0");
    if (!(beta_ >= 1.0) || !std::isfinite(beta_)) throw InstanceError("beta must be >= 1");
    if (!(noise_ >= 0.0) || !std::isfinite(noise_)) throw InstanceError("noise must be >= 0");
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const Link& l = links_[i];
        if (l.id != i) {
            throw InstanceError("link ids must be contiguous from 0; found id " +
                                std::to_string(l.id) + " at position " + std::to_string(i));
        }
        for (double c : {l.sender.x, l.sender.y, l.receiver.x, l.receiver.y}) {
            if (!std::isfinite(c)) {
                throw InstanceError("link " + std::to_string(i) + " has a non-finite coordinate");
            }
        }
        if (!(l.length() > 0.0)) {
            throw InstanceError("link " + std::to_string(i) + " has zero length");
        }
    }
}

double Instance::cross_distance(LinkId from, LinkId to) const {
    return distance(links_.at(from).sender, links_.at(to).receiver);
}

double length_diversity(const Instance& inst) {
    auto [lo, hi] = std::minmax_element(
        inst.links().begin(), inst.links().end(),
        [](const Link& a, const Link& b) { return a.length() < b.length(); });
    return hi->length() / lo->length();
}

Instance generate_instance(const GeneratorParams& p, std::uint64_t seed) {
    if (p.n < 1) throw InstanceError("n must be >= 1");
    if (!(p.l_min > 0.0)) throw InstanceError("l_min must be > 0");
    if (!(p.l_max >= p.l_min)) throw InstanceError("l_max must be >= l_min");
    if (!(p.side > 0.0)) throw InstanceError("side must be > 0");

    RngStream rng(seed, "instance");
    std::vector<Link> links;
    links.reserve(p.n);
    for (std::size_t i = 0; i < p.n; ++i) {
        Point s{rng.uniform(0.0, p.side), rng.uniform(0.0, p.side)};
        double len = p.l_min == p.l_max ? p.l_min : rng.uniform(p.l_min, p.l_max);
        double dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
        Point r{s.x + len * std::cos(dir), s.y + len * std::sin(dir)};
        links.push_back(Link{i, s, r});
    }
    return Instance(std::move(links), p.alpha, p.beta, p.noise);
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok, std::size_t line) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw InstanceError("line " + std::to_string(line) + ": bad number '" + tok + "'");
    }
    return v;
}

std::size_t parse_index(const std::string& tok, std::size_t line) {
    std::size_t v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw InstanceError("line " + std::to_string(line) + ": bad integer '" + tok + "'");
    }
    return v;
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

}  // namespace

void write_instance(std::ostream& out, const Instance& inst) {
    out << inst.size() << ' ' << format_double(inst.alpha()) << ' '
        << format_double(inst.beta()) << ' ' << format_double(inst.noise()) << '\n';
    for (const Link& l : inst.links()) {
        out << l.id << ' ' << format_double(l.sender.x) << ' ' << format_double(l.sender.y)
            << ' ' << format_double(l.receiver.x) << ' ' << format_double(l.receiver.y) << '\n';
    }
}

Instance read_instance(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++lineno;
        header = tokens(line);
    }
    if (header.size() != 4) throw InstanceError("expected header 'n alpha beta noise'");
    std::size_t n = parse_index(header[0], lineno);
    double alpha = parse_double(header[1], lineno);
    double beta = parse_double(header[2], lineno);
    double noise = parse_double(header[3], lineno);

    std::vector<Link> links;
    links.reserve(n);
    while (links.size() < n && std::getline(in, line)) {
        ++lineno;
        auto t = tokens(line);
        if (t.empty()) continue;
        if (t.size() != 5) {
            throw InstanceError("line " + std::to_string(lineno) + ": expected 'id sx sy rx ry'");
        }
        links.push_back(Link{parse_index(t[0], lineno),
                             {parse_double(t[1], lineno), parse_double(t[2], lineno)},
                             {parse_double(t[3], lineno), parse_double(t[4], lineno)}});
    }
    if (links.size() != n) {
        throw InstanceError("expected " + std::to_string(n) + " links, found " +
                            std::to_string(links.size()));
    }
    return Instance(std::move(links), alpha, beta, noise);
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InstanceError("cannot open instance file " + path);
    return read_instance(in);
}

void save_instance(const std::string& path, const Instance& inst) {
    std::ofstream out(path);
    if (!out) throw InstanceError("cannot write instance file " + path);
    write_instance(out, inst);
}

}  // namespace sinrsched
