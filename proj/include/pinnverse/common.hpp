#ifndef PINNVERSE_COMMON_HPP
#define PINNVERSE_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pinnverse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Configuration problems detected before any numerics run (bad shapes,
// unknown parameter names, invalid schedules).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke an API contract (mismatched array lengths, wrong point
// category, seeding a tape output with the wrong dimension).
class contract_violation : public std::logic_error {
public:
    explicit contract_violation(const std::string& what) : std::logic_error(what) {}
};

// NaN/Inf encountered mid-computation. Carries enough context to locate
// the offending stage.
class numeric_fault : public std::runtime_error {
public:
    explicit numeric_fault(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic uniform generator. std::uniform_real_distribution is
// implementation-defined, so draws are built directly from splitmix64
// bits; sequences are reproducible across platforms and compilers.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    // uniform in [0,1)
    double uniform() {
        return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t next_bits() {
        // splitmix64; passes standard equidistribution smoke tests and
        // needs no warmup for low-entropy seeds
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // rejection-free modulo is fine here: n is tiny vs 2^64
        return next_bits() % n;
    }

private:
    std::uint64_t state_;
};

} // namespace pinnverse

#endif
