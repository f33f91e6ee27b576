#include "collatzflow/collatz_map.hpp"

#include <utility>

namespace collatzflow {

Int apply(const CollatzParams& params, const Int& n) {
    if (n < 0) return -apply(params, Int(-n));
    if (n == 0) return Int(0);
    if (boost::multiprecision::bit_test(n, 0)) {
        // alpha*n + beta is even for odd n because alpha, beta are odd.
        return (params.alpha * n + params.beta) >> 1;
    }
    return n >> 1;
}

Int iterate(const CollatzParams& params, Int n, std::uint64_t k) {
    for (std::uint64_t i = 0; i < k; ++i) n = apply(params, n);
    return n;
}

std::string to_string(OrbitTermination t) {
    switch (t) {
        case OrbitTermination::cycle_found: return "cycle_found";
        case OrbitTermination::step_budget_exhausted: return "step_budget_exhausted";
        case OrbitTermination::value_budget_exhausted: return "value_budget_exhausted";
    }
    return "unknown";
}

OrbitRecord orbit(const CollatzParams& params, const Int& n, std::uint64_t max_steps,
                  const Int& max_value) {
    if (max_steps < 1) throw std::invalid_argument("orbit: max_steps must be >= 1");
    if (max_value < boost::multiprecision::abs(n))
        throw std::invalid_argument("orbit: max_value must be >= |n|");

    OrbitRecord rec;
    rec.start = n;
    rec.values.push_back(n);

    // Advances the orbit by one stored step, honoring both budgets.
    auto advance = [&](OrbitTermination& out) -> bool {
        if (rec.values.size() > max_steps) {
            out = OrbitTermination::step_budget_exhausted;
            return false;
        }
        Int next = apply(params, rec.values.back());
        bool over = boost::multiprecision::abs(next) > max_value;
        rec.values.push_back(std::move(next));
        if (over) {
            out = OrbitTermination::value_budget_exhausted;
            return false;
        }
        return true;
    };

    // Brent, phase 1: the hare walks the orbit sequentially, so the stored
    // prefix doubles as the hare's trajectory. Invariant at the top of the
    // loop: values[0..hare] stored, hare - tortoise == lam.
    OrbitTermination stop{};
    if (!advance(stop)) {
        rec.terminated_by = stop;
        return rec;
    }
    std::size_t tortoise = 0, hare = 1;
    std::uint64_t power = 1, lam = 1;
    while (rec.values[tortoise] != rec.values[hare]) {
        if (power == lam) {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        if (!advance(stop)) {
            rec.terminated_by = stop;
            return rec;
        }
        ++hare;
        ++lam;
    }

    // Phase 2: the cycle entry is the first i with values[i] == values[i+lam].
    // i + lam <= tortoise + lam == hare, so the prefix already covers it.
    std::size_t mu = 0;
    while (rec.values[mu] != rec.values[mu + lam]) ++mu;

    rec.values.resize(mu + lam + 1);
    rec.cycle_entry_index = mu;
    rec.cycle_length = lam;
    rec.terminated_by = OrbitTermination::cycle_found;
    return rec;
}

std::string ParityVector::to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

ParityVector parity_vector(const CollatzParams& params, const Int& n, std::uint64_t k) {
    if (n < 1) throw std::invalid_argument("parity_vector: n must be >= 1");
    if (k < 1) throw std::invalid_argument("parity_vector: k must be >= 1");
    ParityVector pv;
    pv.bits.reserve(k);
    Int x = n;
    for (std::uint64_t j = 0; j < k; ++j) {
        pv.bits.push_back(boost::multiprecision::bit_test(x, 0) ? 1 : 0);
        if (j + 1 < k) x = apply(params, x);
    }
    return pv;
}

BijectionCheck parity_bijection_check(const CollatzParams& params, unsigned k) {
    if (k < 1 || k > 30) throw std::invalid_argument("parity_bijection_check: k must be in [1, 30]");
    const std::uint64_t count = std::uint64_t(1) << k;
    // first_seen[vector] = n that produced it, or 0.
    std::vector<std::uint64_t> first_seen(count, 0);
    for (std::uint64_t n = 1; n <= count; ++n) {
        Int x = n;
        std::uint64_t packed = 0;
        for (unsigned j = 0; j < k; ++j) {
            if (boost::multiprecision::bit_test(x, 0)) packed |= std::uint64_t(1) << j;
            if (j + 1 < k) x = apply(params, x);
        }
        if (first_seen[packed] != 0) {
            return BijectionCheck{false, first_seen[packed], n};
        }
        first_seen[packed] = n;
    }
    return BijectionCheck{true, 0, 0};
}

}  // namespace collatzflow
