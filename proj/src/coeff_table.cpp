#include "collatzflow/coeff_table.hpp"

#include <random>
#include <stdexcept>

namespace collatzflow {

Int coeff_sum_a_closed_form(const CollatzParams& params, unsigned k) {
    return pow_int(params.alpha + 1, k);
}

Int coeff_sum_b_closed_form(const CollatzParams& params, unsigned k) {
    if (params.alpha == 3) return params.beta * Int(k) * pow_int(4, k - 1);
    return params.beta * (pow_int(params.alpha + 1, k) - pow_int(4, k)) / (params.alpha - 3);
}

CoeffTable CoeffTable::build(const CollatzParams& params, unsigned k, unsigned max_k_budget) {
    if (k < 1) throw std::invalid_argument("CoeffTable: k must be >= 1");
    if (k > max_k_budget)
        throw std::length_error("CoeffTable: k=" + std::to_string(k) +
                                " exceeds the table budget (2^k entries, budget k<=" +
                                std::to_string(max_k_budget) + ")");

    CoeffTable t(params, k);
    t.a_ = {Int(1), params.alpha};
    t.b_ = {Int(0), params.beta};
    t.exp_ = {0, 1};

    for (unsigned level = 1; level < k; ++level) {
        const std::uint64_t half = std::uint64_t(1) << level;
        std::vector<Int> a_next(half * 2);
        std::vector<Int> b_next(half * 2);
        std::vector<unsigned> exp_next(half * 2);
        const Int shift_term = pow2(level) * params.beta;
        for (std::uint64_t j = 0; j < half * 2; ++j) {
            const std::uint64_t i = j & (half - 1);
            // j itself represents its class, so C^level(j) comes straight
            // from the current table; its parity picks the branch.
            Int c_level = (t.a_[i] * j + t.b_[i]) >> level;
            if (boost::multiprecision::bit_test(c_level, 0)) {
                a_next[j] = params.alpha * t.a_[i];
                b_next[j] = params.alpha * t.b_[i] + shift_term;
                exp_next[j] = t.exp_[i] + 1;
            } else {
                a_next[j] = t.a_[i];
                b_next[j] = t.b_[i];
                exp_next[j] = t.exp_[i];
            }
        }
        t.a_ = std::move(a_next);
        t.b_ = std::move(b_next);
        t.exp_ = std::move(exp_next);
    }
    return t;
}

std::uint64_t CoeffTable::residue_of(const Int& n) const {
    Int r = n % pow2(k_);
    if (r < 0) r += pow2(k_);
    return r.convert_to<std::uint64_t>();
}

Int CoeffTable::eval(const Int& n) const {
    const std::uint64_t i = residue_of(n);
    return (a_[i] * n + b_[i]) >> k_;
}

CoeffSums CoeffTable::coeff_sums() const {
    CoeffSums sums{Int(0), Int(0)};
    for (const auto& v : a_) sums.sum_a += v;
    for (const auto& v : b_) sums.sum_b += v;
    if (sums.sum_a != coeff_sum_a_closed_form(params_, k_))
        throw std::logic_error("coeff_sums: sum of a-coefficients deviates from (alpha+1)^k");
    if (sums.sum_b != coeff_sum_b_closed_form(params_, k_))
        throw std::logic_error("coeff_sums: sum of b-coefficients deviates from closed form");
    return sums;
}

std::optional<DecompositionFailure> verify_mod_decomposition(const CoeffTable& table,
                                                             std::uint64_t sample_count) {
    const auto& params = table.params();
    const unsigned k = table.k();
    const Int two_k = pow2(k);

    auto check = [&](const Int& n) -> std::optional<DecompositionFailure> {
        Int lhs = two_k * iterate(params, n, k);
        const std::uint64_t i = table.residue_of(n);
        Int rhs = table.a(i) * n + table.b(i);
        if (lhs != rhs) return DecompositionFailure{n, std::move(lhs), std::move(rhs)};
        return std::nullopt;
    };

    if (k <= 12) {
        const std::uint64_t limit = std::uint64_t(1) << (k + 2);
        for (std::uint64_t n = 1; n <= limit; ++n)
            if (auto fail = check(Int(n))) return fail;
    }
    std::mt19937_64 rng(0x5eedull ^ (std::uint64_t(k) << 32));
    for (std::uint64_t s = 0; s < sample_count; ++s) {
        // 128-bit samples exercise multi-word arithmetic.
        Int n = (Int(rng()) << 64) | Int(rng());
        if (auto fail = check(n)) return fail;
    }
    return std::nullopt;
}

}  // namespace collatzflow
