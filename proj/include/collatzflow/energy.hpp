#pragma once

// Block sums of the iterated map and their exact identities:
//   s_k(n)   = sum_{j<2^k} C^k(n+j),
//   s_km(n)  = sum_{j<2^k} C^k(n+j+m*2^k),
//   energy   = s_k(n+2^k) - s_k(n) = (1+alpha)^k  for every n  (conservation),
//   s_km     = s_k + m*(1+alpha)^k                (telescoping shift),
// together with rational lower/upper brackets on s_k and the 4^-k-normalized
// pseudo-virial average ((1+alpha)/4)^k.

#include "collatzflow/collatz_map.hpp"
#include "collatzflow/numeric.hpp"

#include <cstdint>
#include <vector>

namespace collatzflow {

/// Finite-k rational brackets on s_k(n), valid for k >= 0 with equality at
/// k = 0:  lower(n) = n + ((1+a)^k - 1)/(2a),
///         upper(n) = (n - a/2 + b/(a-2))*a^k + (a/2)(1+a)^k - (b/(a-2))*2^k.
/// a-2 is never zero since a is odd; for a = 1 the b/(a-2) terms are -b.
struct SkBrackets {
    SkBrackets(const CollatzParams& params, unsigned k);

    Rat lower(const Int& n) const { return Rat(n) + lower_const_; }
    Rat upper(const Int& n) const { return Rat(n) * alpha_pow_k_ + upper_const_; }
    bool contains(const Int& n, const Int& s_k) const {
        return Rat(s_k) >= lower(n) && Rat(s_k) <= upper(n);
    }

private:
    Rat lower_const_;
    Rat upper_const_;
    Int alpha_pow_k_;
};

struct EnergySums {
    CollatzParams params;
    Int n;
    unsigned k = 0;
    unsigned m = 0;
    Int s_k;
    Int s_km;
};

/// sum_{j<2^k} (C^k(n+j+2^k) - C^k(n+j)) by direct iteration. Equals
/// (1+alpha)^k for every n >= 1; callers assert that separately.
Int energy_sum(const CollatzParams& params, const Int& n, unsigned k);

/// Both block sums by direct iteration. Verifies the telescoping identity
/// s_km == s_k + m*(1+alpha)^k and the SkBrackets bounds with exact rational
/// arithmetic; a violation throws std::logic_error (implementation bug).
EnergySums partial_sums(const CollatzParams& params, const Int& n, unsigned k, unsigned m);

/// (1/4^k) * sum_{j=n}^{n+2^k-1} (C^k(j+2^k) - C^k(j)) as an exact rational;
/// equals ((1+alpha)/4)^k, identically 1 in the classical case alpha = 3.
Rat pseudo_virial(const CollatzParams& params, const Int& n, unsigned k);

struct RatioRow {
    unsigned k = 0;
    Rat ratio;          // s_km / s_k
    Rat lower_bracket;  // 1 + m*(1+alpha)^k / upper(s_k)
    Rat upper_bracket;  // 1 + m*(1+alpha)^k / lower(s_k)
    bool within = false;
};

/// Exact ratios s_km(n)/s_k(n) for k = 1..k_max plus the finite-k brackets
/// implied by the bounds on s_k. The ratio lies within its bracket for
/// every k >= 1.
std::vector<RatioRow> ratio_report(const CollatzParams& params, const Int& n, unsigned m,
                                   unsigned k_max);

/// Pointwise step bounds C(x) >= x/2 and C(x) <= (alpha*x+beta)/2 for x >= 0,
/// compared as integers (2*C(x) vs x and alpha*x+beta).
bool step_bounds_hold(const CollatzParams& params, const Int& x);

/// Precomputed C^k over a contiguous block [1, n_max + (m_max+1)*2^k - 1],
/// each value by direct k-fold iteration, with prefix sums so that s_k, s_km
/// and the energy sum are O(1) per query. Backs the exhaustive sweeps.
class EnergyGrid {
public:
    EnergyGrid(const CollatzParams& params, unsigned k, std::uint64_t n_max, unsigned m_max);

    const CollatzParams& params() const { return params_; }
    unsigned k() const { return k_; }

    Int s_k(std::uint64_t n) const;                    // n in [1, n_max + m_max*2^k]
    Int s_km(std::uint64_t n, unsigned m) const;       // m in [0, m_max]
    Int energy(std::uint64_t n) const;                 // s_k(n+2^k) - s_k(n)
    Rat pseudo_virial(std::uint64_t n) const;

private:
    CollatzParams params_;
    unsigned k_;
    std::uint64_t n_max_;
    unsigned m_max_;
    std::vector<Int> prefix_;  // prefix_[x] = sum_{y<=x} C^k(y), prefix_[0] = 0
};

}  // namespace collatzflow
