#include "collatzflow/derivative.hpp"

#include <random>
#include <stdexcept>

namespace collatzflow {

namespace {

std::vector<Int> binomials(unsigned m) {
    std::vector<Int> row{1};
    for (unsigned i = 1; i <= m; ++i) {
        row.push_back(1);
        for (unsigned j = i - 1; j >= 1; --j) row[j] += row[j - 1];
    }
    return row;
}

}  // namespace

Int derivative_n_sum_closed_form(const CollatzParams& params, unsigned m) {
    return pow_int(params.alpha - 3, m);
}

Int derivative_free_sum_closed_form(const CollatzParams& params, unsigned m) {
    if (m < 1) throw std::invalid_argument("derivative sums need m >= 1");
    return params.beta * pow_int(params.alpha - 3, m - 1);
}

DerivativeDecomposition DerivativeDecomposition::build(const CollatzParams& params, unsigned m,
                                                       unsigned max_m_budget) {
    if (m < 1) throw std::invalid_argument("DerivativeDecomposition: m must be >= 1");
    if (m > max_m_budget)
        throw std::length_error("DerivativeDecomposition: m exceeds the 2^m table budget");

    // Tables for orders 1..m; order 0 is the identity (a=1, b=0).
    std::vector<CoeffTable> tables;
    tables.reserve(m);
    for (unsigned order = 1; order <= m; ++order)
        tables.push_back(CoeffTable::build(params, order, max_m_budget));

    const std::vector<Int> binom = binomials(m);
    DerivativeDecomposition decomp(params, m);
    decomp.per_class_.resize(std::uint64_t(1) << m);
    decomp.n_coeff_sum_ = 0;
    decomp.free_coeff_sum_ = 0;

    for (std::uint64_t r = 0; r < decomp.per_class_.size(); ++r) {
        DerivativeClass cls;
        cls.residue = r;
        Int sign_pow = 1;  // (-2)^j
        for (unsigned j = 0; j <= m; ++j) {
            const unsigned order = m - j;
            if (order == 0) {
                cls.n_coeff_numerator += binom[j] * sign_pow;
            } else {
                const std::uint64_t rj = r & ((std::uint64_t(1) << order) - 1);
                cls.n_coeff_numerator += binom[j] * sign_pow * tables[order - 1].a(rj);
                cls.free_coeff_numerator += binom[j] * sign_pow * tables[order - 1].b(rj);
            }
            sign_pow *= -2;
        }
        decomp.n_coeff_sum_ += cls.n_coeff_numerator;
        decomp.free_coeff_sum_ += cls.free_coeff_numerator;
        decomp.per_class_[r] = std::move(cls);
    }

    if (decomp.n_coeff_sum_ != derivative_n_sum_closed_form(params, m))
        throw std::logic_error("derivative decomposition: n-coefficient sum != (alpha-3)^m");
    if (decomp.free_coeff_sum_ != derivative_free_sum_closed_form(params, m))
        throw std::logic_error("derivative decomposition: free-coefficient sum != beta(alpha-3)^(m-1)");
    return decomp;
}

Int discrete_derivative_value(const CollatzParams& params, const Int& n, std::uint64_t k,
                              unsigned m) {
    if (n < 1) throw std::invalid_argument("discrete_derivative_value: n must be >= 1");
    if (m < 1) throw std::invalid_argument("discrete_derivative_value: m must be >= 1");
    const Int base = iterate(params, n, k);
    const std::vector<Int> binom = binomials(m);
    Int result = 0;
    // powers[i] = C^i(base); one orbit walk serves every binomial term.
    std::vector<Int> powers(m + 1);
    powers[0] = base;
    for (unsigned i = 1; i <= m; ++i) powers[i] = apply(params, powers[i - 1]);
    for (unsigned j = 0; j <= m; ++j) {
        const Int term = binom[j] * powers[m - j];
        if (j % 2 == 0)
            result += term;
        else
            result -= term;
    }
    return result;
}

std::optional<AffineRepresentationFailure> verify_affine_representation(
    const DerivativeDecomposition& decomp, std::uint64_t sample_count, unsigned k_sweep) {
    const auto& params = decomp.params();
    const unsigned m = decomp.m();
    const Int two_m = pow2(m);
    const std::uint64_t classes = std::uint64_t(1) << m;

    auto check = [&](const Int& n, std::uint64_t k) -> std::optional<AffineRepresentationFailure> {
        Int lhs = two_m * discrete_derivative_value(params, n, k, m);
        const Int x = iterate(params, n, k);
        const std::uint64_t r = (x % classes).convert_to<std::uint64_t>();
        const auto& cls = decomp.at(r);
        Int rhs = cls.n_coeff_numerator * x + cls.free_coeff_numerator;
        if (lhs != rhs) return AffineRepresentationFailure{n, k, std::move(lhs), std::move(rhs)};
        return std::nullopt;
    };

    for (std::uint64_t n = 1; n <= (std::uint64_t(1) << (m + 2)); ++n)
        for (std::uint64_t k = 0; k <= k_sweep; ++k)
            if (auto fail = check(Int(n), k)) return fail;

    std::mt19937_64 rng(0xd127ull ^ (std::uint64_t(m) << 40));
    for (std::uint64_t s = 0; s < sample_count; ++s) {
        Int n = (Int(rng()) << 64) | Int(rng());
        if (auto fail = check(n, rng() % (k_sweep + 1))) return fail;
    }
    return std::nullopt;
}

}  // namespace collatzflow
