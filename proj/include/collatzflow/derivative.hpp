#pragma once

// Discrete time derivative along the orbit, D_t(C^k(n)) = C^(k+1)(n) - C^k(n),
// and its m-fold iterate (C-I)^m. Writing x = C^k(n), the m-th derivative is
// an affine function of x determined by x mod 2^m:
//   2^m * D_t^m(x) = n_coeff[r]*x + free_coeff[r],   r = x mod 2^m,
// with numerators built from the affine tables of orders 0..m. The numerators
// sum to (alpha-3)^m and beta*(alpha-3)^(m-1) respectively (with the k=0
// tables read as a=1, b=0, so the m=1 free sum is beta for every alpha).

#include "collatzflow/coeff_table.hpp"
#include "collatzflow/collatz_map.hpp"
#include "collatzflow/numeric.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace collatzflow {

struct DerivativeClass {
    std::uint64_t residue = 0;
    Int n_coeff_numerator;
    Int free_coeff_numerator;
};

class DerivativeDecomposition {
public:
    /// Builds the per-class coefficients for order m from the level-1..m
    /// affine tables:
    ///   n_coeff[r]    = sum_j binom(m,j) (-2)^j a(r mod 2^(m-j), m-j),
    ///   free_coeff[r] = sum_j binom(m,j) (-2)^j b(r mod 2^(m-j), m-j),
    /// and checks the aggregate sums against the closed forms; a mismatch
    /// throws std::logic_error.
    static DerivativeDecomposition build(const CollatzParams& params, unsigned m,
                                         unsigned max_m_budget = 24);

    const CollatzParams& params() const { return params_; }
    unsigned m() const { return m_; }
    Int denominator() const { return pow2(m_); }
    const std::vector<DerivativeClass>& per_class() const { return per_class_; }
    const DerivativeClass& at(std::uint64_t residue) const { return per_class_[residue]; }
    const Int& n_coeff_sum() const { return n_coeff_sum_; }
    const Int& free_coeff_sum() const { return free_coeff_sum_; }

private:
    DerivativeDecomposition(CollatzParams params, unsigned m)
        : params_(std::move(params)), m_(m) {}

    CollatzParams params_;
    unsigned m_;
    std::vector<DerivativeClass> per_class_;
    Int n_coeff_sum_;
    Int free_coeff_sum_;
};

/// Closed forms for the aggregate coefficient sums; (alpha-3)^0 reads as 1,
/// so derivative_free_sum_closed_form(params, 1) == beta for every alpha.
Int derivative_n_sum_closed_form(const CollatzParams& params, unsigned m);
Int derivative_free_sum_closed_form(const CollatzParams& params, unsigned m);

/// D_t^m(C^k(n)) = sum_j binom(m,j) (-1)^j C^(m-j)(C^k(n)) by direct
/// iteration; may be negative. Requires n >= 1, m >= 1.
Int discrete_derivative_value(const CollatzParams& params, const Int& n, std::uint64_t k,
                              unsigned m);

struct AffineRepresentationFailure {
    Int n;
    std::uint64_t k = 0;
    Int lhs;  // 2^m * D_t^m(C^k(n)) by direct iteration
    Int rhs;  // n_coeff*C^k(n) + free_coeff from the decomposition
};

/// Checks 2^m * discrete_derivative_value(n, k, m) against the affine form
/// exhaustively for n in [1, 2^(m+2)], k in [0, k_sweep], plus sampled
/// (n, k) pairs from a deterministic generator. Returns the first
/// counterexample, or nullopt.
std::optional<AffineRepresentationFailure> verify_affine_representation(
    const DerivativeDecomposition& decomp, std::uint64_t sample_count, unsigned k_sweep = 4);

}  // namespace collatzflow
