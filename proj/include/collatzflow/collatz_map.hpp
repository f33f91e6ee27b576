#pragma once

// Exact big-integer dynamics of the generalized accelerated Collatz map
//   C(n) = n/2            for even n,
//   C(n) = (alpha*n+beta)/2 for odd n,
// extended to all integers by odd symmetry C(-n) = -C(n), C(0) = 0.

#include "collatzflow/numeric.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace collatzflow {

/// The pair (alpha, beta) defining the map. Both must be odd positive and
/// coprime; construction validates and throws std::invalid_argument.
struct CollatzParams {
    Int alpha;
    Int beta;

    CollatzParams(Int alpha_, Int beta_) : alpha(std::move(alpha_)), beta(std::move(beta_)) {
        if (alpha <= 0 || alpha % 2 == 0)
            throw std::invalid_argument("alpha must be odd and positive, got " + alpha.str());
        if (beta <= 0 || beta % 2 == 0)
            throw std::invalid_argument("beta must be odd and positive, got " + beta.str());
        if (boost::multiprecision::gcd(alpha, beta) != 1)
            throw std::invalid_argument("alpha and beta must be coprime, got (" + alpha.str() +
                                        ", " + beta.str() + ")");
    }

    bool operator==(const CollatzParams&) const = default;
};

/// One application of C. Total on Z: negatives via odd symmetry.
Int apply(const CollatzParams& params, const Int& n);

/// C^k(n); C^0 is the identity.
Int iterate(const CollatzParams& params, Int n, std::uint64_t k);

enum class OrbitTermination {
    cycle_found,
    step_budget_exhausted,
    value_budget_exhausted,
};

std::string to_string(OrbitTermination t);

/// A stored forward orbit n, C(n), C^2(n), ...
///
/// When a cycle is found, `values` holds exactly the segment up to the first
/// repetition: values[cycle_entry_index + cycle_length] == values[cycle_entry_index],
/// and no earlier pair of equal entries exists. On value-budget exhaustion the
/// last stored entry is the first value whose magnitude exceeded the budget.
struct OrbitRecord {
    Int start;
    std::vector<Int> values;
    std::optional<std::uint64_t> cycle_entry_index;  // steps before entering the cycle
    std::optional<std::uint64_t> cycle_length;
    OrbitTermination terminated_by = OrbitTermination::cycle_found;
};

/// Forward orbit with Brent cycle detection under explicit budgets.
/// Divergence is possible for alpha >= 5, so budget exhaustion is a recorded
/// outcome, never a hang. Requires max_steps >= 1 and max_value >= |n|.
OrbitRecord orbit(const CollatzParams& params, const Int& n, std::uint64_t max_steps,
                  const Int& max_value);

/// bits[j] = C^j(n) mod 2 for j = 0..k-1.
struct ParityVector {
    std::vector<std::uint8_t> bits;

    bool operator==(const ParityVector&) const = default;
    std::string to_string() const;
};

/// Parity vector of n along its orbit. Requires n >= 1, k >= 1.
ParityVector parity_vector(const CollatzParams& params, const Int& n, std::uint64_t k);

/// Result of sweeping n in [1, 2^k]: either all 2^k parity vectors are
/// distinct, or a colliding pair is reported.
struct BijectionCheck {
    bool bijective = false;
    std::uint64_t colliding_a = 0;  // valid only when !bijective
    std::uint64_t colliding_b = 0;
};

/// Checks that n -> parity_vector(n, k) is a bijection [1, 2^k] -> {0,1}^k.
/// Requires 1 <= k <= 30 (the sweep materializes 2^k entries).
BijectionCheck parity_bijection_check(const CollatzParams& params, unsigned k);

}  // namespace collatzflow
