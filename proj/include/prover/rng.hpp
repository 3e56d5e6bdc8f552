#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace prover {

// mt19937_64 plus distribution helpers implemented by hand so that sampled
// streams are identical across standard libraries (std::*_distribution is
// not portable across implementations).
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    // Derive a stream from several seed components; order matters.
    static Rng from_components(std::initializer_list<uint64_t> parts) {
        std::seed_seq seq(parts.begin(), parts.end());
        std::mt19937_64 g(seq);
        Rng r(0);
        r.gen_ = g;
        return r;
    }

    uint64_t next_u64() { return gen_(); }

    // Engine state as text (the standard guarantees stream round-trips).
    std::string state() const {
        std::ostringstream os;
        os << gen_;
        return os.str();
    }

    void set_state(const std::string& s) {
        std::istringstream is(s);
        is >> gen_;
        if (is.fail()) throw std::invalid_argument("Rng::set_state: malformed state string");
    }

    // Uniform in [0, 1). 53-bit mantissa resolution.
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        // Rejection sampling to avoid modulo bias.
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    int range(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    // Standard normal via Box-Muller (one value per call, no caching so the
    // stream stays a pure function of call order).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Sample an index from unnormalized non-negative weights.
    std::size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::invalid_argument("categorical: no mass");
        double x = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return weights.size() - 1;  // x landed on the rounding edge
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace prover
