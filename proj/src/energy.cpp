#include "collatzflow/energy.hpp"

#include <algorithm>
#include <stdexcept>

namespace collatzflow {

SkBrackets::SkBrackets(const CollatzParams& params, unsigned k) {
    const Rat a(params.alpha), b(params.beta);
    const Int one_plus_a_k = pow_int(params.alpha + 1, k);
    alpha_pow_k_ = pow_int(params.alpha, k);
    lower_const_ = Rat(one_plus_a_k - 1) / (2 * a);
    const Rat b_term = b / (a - 2);
    upper_const_ = (b_term - a / 2) * Rat(alpha_pow_k_) + (a / 2) * Rat(one_plus_a_k) -
                   b_term * Rat(pow2(k));
}

namespace {

Int block_sum(const CollatzParams& params, const Int& n, unsigned k, const Int& offset) {
    Int sum = 0;
    const std::uint64_t block = std::uint64_t(1) << k;
    for (std::uint64_t j = 0; j < block; ++j) sum += iterate(params, n + offset + j, k);
    return sum;
}

}  // namespace

Int energy_sum(const CollatzParams& params, const Int& n, unsigned k) {
    if (n < 1) throw std::invalid_argument("energy_sum: n must be >= 1");
    return block_sum(params, n, k, pow2(k)) - block_sum(params, n, k, Int(0));
}

EnergySums partial_sums(const CollatzParams& params, const Int& n, unsigned k, unsigned m) {
    if (n < 1) throw std::invalid_argument("partial_sums: n must be >= 1");
    EnergySums sums{params, n, k, m, block_sum(params, n, k, Int(0)),
                    block_sum(params, n, k, Int(m) * pow2(k))};
    if (sums.s_km != sums.s_k + Int(m) * pow_int(params.alpha + 1, k))
        throw std::logic_error("partial_sums: telescoping identity s_km = s_k + m(1+alpha)^k failed");
    if (!SkBrackets(params, k).contains(n, sums.s_k))
        throw std::logic_error("partial_sums: s_k escaped its rational brackets");
    return sums;
}

Rat pseudo_virial(const CollatzParams& params, const Int& n, unsigned k) {
    return Rat(energy_sum(params, n, k)) / Rat(pow_int(4, k));
}

std::vector<RatioRow> ratio_report(const CollatzParams& params, const Int& n, unsigned m,
                                   unsigned k_max) {
    std::vector<RatioRow> rows;
    rows.reserve(k_max);
    for (unsigned k = 1; k <= k_max; ++k) {
        EnergySums sums = partial_sums(params, n, k, m);
        SkBrackets brackets(params, k);
        RatioRow row;
        row.k = k;
        row.ratio = Rat(sums.s_km) / Rat(sums.s_k);
        const Rat shift = Rat(Int(m) * pow_int(params.alpha + 1, k));
        row.upper_bracket = 1 + shift / brackets.lower(n);
        row.lower_bracket = 1 + shift / brackets.upper(n);
        row.within = row.lower_bracket <= row.ratio && row.ratio <= row.upper_bracket;
        rows.push_back(std::move(row));
    }
    return rows;
}

bool step_bounds_hold(const CollatzParams& params, const Int& x) {
    const Int twice = 2 * apply(params, x);
    return twice >= x && twice <= params.alpha * x + params.beta;
}

EnergyGrid::EnergyGrid(const CollatzParams& params, unsigned k, std::uint64_t n_max,
                       unsigned m_max)
    : params_(params), k_(k), n_max_(n_max), m_max_(m_max) {
    const std::uint64_t block = std::uint64_t(1) << k;
    // energy(n) reads one block past s_km(n, 1), so cover at least two blocks.
    const std::uint64_t blocks_past = std::max<std::uint64_t>(m_max, 1) + 1;
    const std::uint64_t limit = n_max + blocks_past * block - 1;
    prefix_.resize(limit + 1);
    prefix_[0] = 0;
    for (std::uint64_t x = 1; x <= limit; ++x)
        prefix_[x] = prefix_[x - 1] + iterate(params_, Int(x), k_);
}

Int EnergyGrid::s_k(std::uint64_t n) const {
    const std::uint64_t block = std::uint64_t(1) << k_;
    return prefix_.at(n + block - 1) - prefix_.at(n - 1);
}

Int EnergyGrid::s_km(std::uint64_t n, unsigned m) const {
    return s_k(n + std::uint64_t(m) * (std::uint64_t(1) << k_));
}

Int EnergyGrid::energy(std::uint64_t n) const { return s_km(n, 1) - s_k(n); }

Rat EnergyGrid::pseudo_virial(std::uint64_t n) const {
    return Rat(energy(n)) / Rat(pow_int(4, k_));
}

}  // namespace collatzflow
