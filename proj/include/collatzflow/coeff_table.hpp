#pragma once

// Residue-class affine decomposition of the iterated map:
//   2^k * C^k(n) = a[i]*n + b[i]   for n == i (mod 2^k), i in [0, 2^k - 1].
// Every a[i] is a power of alpha, independent of beta, and the tables obey
//   sum a[i] = (alpha+1)^k,
//   sum b[i] = beta*((alpha+1)^k - 4^k)/(alpha-3)   for alpha != 3,
//            = beta*k*(alpha+1)^(k-1)               for alpha == 3.

#include "collatzflow/collatz_map.hpp"
#include "collatzflow/numeric.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace collatzflow {

struct CoeffSums {
    Int sum_a;
    Int sum_b;
};

/// Closed forms for the table sums at level k.
Int coeff_sum_a_closed_form(const CollatzParams& params, unsigned k);
Int coeff_sum_b_closed_form(const CollatzParams& params, unsigned k);

class CoeffTable {
public:
    /// Builds the level-k table by the doubling recurrence: level 1 is
    /// {a,b} = {1,0} on the even class and {alpha,beta} on the odd class;
    /// each step splits class j mod 2^k into j and j+2^k mod 2^(k+1) and
    /// multiplies through by alpha (adding 2^k*beta to b) on the classes
    /// where C^k is odd. Requires 1 <= k <= max_k_budget (table size is 2^k).
    static CoeffTable build(const CollatzParams& params, unsigned k, unsigned max_k_budget = 24);

    const CollatzParams& params() const { return params_; }
    unsigned k() const { return k_; }
    std::uint64_t size() const { return std::uint64_t(1) << k_; }
    const Int& a(std::uint64_t residue) const { return a_[residue]; }
    const Int& b(std::uint64_t residue) const { return b_[residue]; }
    const std::vector<Int>& a_all() const { return a_; }
    const std::vector<Int>& b_all() const { return b_; }

    /// Residue class of n (n may be any integer; result in [0, 2^k - 1]).
    std::uint64_t residue_of(const Int& n) const;

    /// C^k(n) evaluated through the table.
    Int eval(const Int& n) const;

    /// Exponent e with a[residue] = alpha^e. For alpha = 1 the exponent is
    /// not recoverable from a alone, so it is counted during construction.
    unsigned alpha_exponent(std::uint64_t residue) const { return exp_[residue]; }

    /// Exact sums, checked against the closed forms; throws std::logic_error
    /// on mismatch (that would be an implementation bug, not bad input).
    CoeffSums coeff_sums() const;

private:
    CoeffTable(CollatzParams params, unsigned k) : params_(std::move(params)), k_(k) {}

    CollatzParams params_;
    unsigned k_;
    std::vector<Int> a_;
    std::vector<Int> b_;
    std::vector<unsigned> exp_;  // a_[i] == alpha^exp_[i]
};

/// Witness for a failed decomposition check.
struct DecompositionFailure {
    Int n;
    Int lhs;  // 2^k * C^k(n) by direct iteration
    Int rhs;  // a*n + b from the table
};

/// Checks 2^k * iterate(n, k) == a[n mod 2^k]*n + b[n mod 2^k] against the
/// independent orbit route. Exhaustive over n in [1, 2^(k+2)] when k <= 12,
/// plus `sample_count` samples from a deterministic generator above that
/// range. Returns the first counterexample, or nullopt if none.
std::optional<DecompositionFailure> verify_mod_decomposition(const CoeffTable& table,
                                                             std::uint64_t sample_count);

}  // namespace collatzflow
