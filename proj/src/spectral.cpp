#include "collatzflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace collatzflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SmallParams {
    std::uint64_t alpha;
    std::uint64_t beta;
};

SmallParams small_params(const CollatzParams& params) {
    if (params.alpha >= pow2(32) || params.beta >= pow2(32))
        throw std::invalid_argument("spectral operations require alpha, beta < 2^32");
    return {params.alpha.convert_to<std::uint64_t>(), params.beta.convert_to<std::uint64_t>()};
}

Complex root_of_unity(std::uint64_t numerator, std::uint64_t m) {
    // exp(2 pi i * numerator / m), exponent reduced mod m first.
    const double angle = kTwoPi * double(numerator % m) / double(m);
    return {std::cos(angle), std::sin(angle)};
}

/// lambda_j^{-q} for lambda_j = exp(2 pi i j / m).
Complex root_inverse_power(std::uint64_t j, std::uint64_t q, std::uint64_t m) {
    const std::uint64_t e = (j % m) * (q % m) % m;
    return root_of_unity(m - e, m);
}

}  // namespace

double SpectralState::norm_sq() const {
    double acc = 0.0;
    for (const auto& [f, a] : amplitudes) acc += std::norm(a);
    return acc;
}

double SpectralState::norm() const { return std::sqrt(norm_sq()); }

SpectralState make_delta(const CollatzParams& params, std::uint64_t frequency) {
    SpectralState s(params);
    s.set(frequency, {1.0, 0.0});
    return s;
}

SpectralState make_ones(const CollatzParams& params, const std::vector<std::uint64_t>& freqs) {
    SpectralState s(params);
    for (auto f : freqs) s.set(f, {1.0, 0.0});
    return s;
}

Complex inner_product(const SpectralState& u, const SpectralState& v) {
    Complex acc{0.0, 0.0};
    for (const auto& [f, a] : u.amplitudes) acc += a * std::conj(v.at(f));
    return acc;
}

Preimages preimages(const CollatzParams& params, std::uint64_t m) {
    const auto [alpha, beta] = small_params(params);
    if (m > (std::uint64_t(1) << 62)) throw std::overflow_error("preimages: frequency too large");
    Preimages p{2 * m, std::nullopt};
    if (2 * m > beta && (2 * m - beta) % alpha == 0) p.odd = (2 * m - beta) / alpha;
    return p;
}

bool has_second_preimage(const CollatzParams& params, std::uint64_t m) {
    return preimages(params, m).odd.has_value();
}

SpectralState apply_operator(const SpectralState& state) {
    SpectralState out(state.params);
    out.time = state.time;
    for (const auto& [m, amp] : state.amplitudes) {
        const Preimages p = preimages(state.params, m);
        out.amplitudes[p.even] = amp;
        if (p.odd) out.amplitudes[*p.odd] = amp;
    }
    return out;
}

SpectralState apply_adjoint(const SpectralState& state) {
    const auto [alpha, beta] = small_params(state.params);
    SpectralState out(state.params);
    out.time = state.time;
    for (const auto& [n, amp] : state.amplitudes) {
        const std::uint64_t target =
            (n % 2 == 0) ? n / 2 : (alpha * n + beta) / 2;
        out.amplitudes[target] += amp;
    }
    for (auto it = out.amplitudes.begin(); it != out.amplitudes.end();) {
        if (it->second == Complex{0.0, 0.0})
            it = out.amplitudes.erase(it);
        else
            ++it;
    }
    return out;
}

std::vector<NormCertificate> norm_certificates(const CollatzParams& params,
                                               const std::vector<SpectralState>& test_states,
                                               double tol) {
    std::vector<NormCertificate> report;
    report.reserve(test_states.size());
    const double sqrt2 = std::sqrt(2.0);
    for (const auto& u : test_states) {
        NormCertificate cert;
        cert.norm_u = u.norm();
        cert.norm_Cu = apply_operator(u).norm();
        const double slack = tol * std::max(1.0, cert.norm_u);
        cert.sandwich_ok = cert.norm_u <= cert.norm_Cu + slack &&
                           cert.norm_Cu <= sqrt2 * cert.norm_u + slack;

        bool any_single = false, any_double = false;
        for (const auto& [f, a] : u.amplitudes)
            (has_second_preimage(params, f) ? any_double : any_single) = true;
        if (!any_single && !any_double)
            cert.support = NormCertificate::Support::empty;
        else if (any_single && any_double)
            cert.support = NormCertificate::Support::mixed;
        else
            cert.support = any_double ? NormCertificate::Support::double_preimage
                                      : NormCertificate::Support::single_preimage;

        switch (cert.support) {
            case NormCertificate::Support::single_preimage:
                cert.equality_ok = std::abs(cert.norm_Cu - cert.norm_u) <= slack;
                break;
            case NormCertificate::Support::double_preimage:
                cert.equality_ok = std::abs(cert.norm_Cu - sqrt2 * cert.norm_u) <= slack;
                break;
            default:
                cert.equality_ok = true;
        }
        report.push_back(cert);
    }
    return report;
}

std::vector<SpectralState> adjoint_kernel_basis(const CollatzParams& params,
                                                std::uint64_t n_max) {
    const auto [alpha, beta] = small_params(params);
    std::vector<SpectralState> basis;
    for (std::uint64_t n = 1; n <= n_max; n += 2) {
        SpectralState s(params);
        s.set(n, {1.0, 0.0});
        s.set(alpha * n + beta, {-1.0, 0.0});
        basis.push_back(std::move(s));
    }
    return basis;
}

FlowClosure FlowClosure::build(const CollatzParams& params, std::vector<std::uint64_t> window,
                               std::uint64_t max_steps, std::uint64_t max_value) {
    if (window.empty()) throw std::invalid_argument("flow closure: window must be nonempty");
    std::sort(window.begin(), window.end());
    window.erase(std::unique(window.begin(), window.end()), window.end());
    if (window.front() < 1) throw std::invalid_argument("flow closure: frequencies start at 1");

    FlowClosure fc(params);
    fc.window_ = window;
    const Int value_cap(max_value);

    for (const std::uint64_t f : window) {
        if (fc.meta_.count(f)) continue;
        std::vector<std::uint64_t> path;
        std::map<std::uint64_t, std::size_t> pos;
        std::uint64_t x = f;
        while (true) {
            if (auto known = fc.meta_.find(x); known != fc.meta_.end()) {
                // Joined previously resolved territory at x.
                const OrbitMeta& mx = known->second;
                for (std::size_t i = 0; i < path.size(); ++i)
                    fc.meta_[path[i]] = OrbitMeta{std::uint64_t(path.size() - i) + mx.ell,
                                                  mx.cycle_length, mx.cycle_phase, mx.cycle_id};
                break;
            }
            if (auto seen = pos.find(x); seen != pos.end()) {
                // Fresh cycle: path[entry..] closes at x.
                const std::size_t entry = seen->second;
                const std::uint64_t m = path.size() - entry;
                const std::size_t id = fc.cycles_.size();
                fc.cycles_.emplace_back(path.begin() + entry, path.end());
                for (std::uint64_t p = 0; p < m; ++p)
                    fc.meta_[path[entry + p]] = OrbitMeta{0, m, p, id};
                for (std::size_t i = 0; i < entry; ++i)
                    fc.meta_[path[i]] = OrbitMeta{std::uint64_t(entry - i), m, 0, id};
                break;
            }
            pos[x] = path.size();
            path.push_back(x);
            if (path.size() > max_steps) throw BudgetExhausted(f);
            const Int next = apply(params, Int(x));
            if (next > value_cap) throw BudgetExhausted(f);
            const std::uint64_t nx = next.convert_to<std::uint64_t>();
            fc.edges_[x] = nx;
            x = nx;
        }
    }

    fc.nodes_.reserve(fc.meta_.size());
    for (const auto& [n, m] : fc.meta_) fc.nodes_.push_back(n);
    return fc;  // map iteration yields sorted nodes
}

FlowClosure FlowClosure::synthetic_chain(const CollatzParams& params,
                                         std::vector<std::uint64_t> path) {
    if (path.empty()) throw std::invalid_argument("synthetic chain: path must be nonempty");
    FlowClosure fc(params);
    fc.window_ = path;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) fc.edges_[path[i]] = path[i + 1];
    fc.nodes_ = path;
    std::sort(fc.nodes_.begin(), fc.nodes_.end());
    if (std::adjacent_find(fc.nodes_.begin(), fc.nodes_.end()) != fc.nodes_.end())
        throw std::invalid_argument("synthetic chain: nodes must be distinct");
    return fc;
}

std::size_t FlowClosure::index_of(std::uint64_t frequency) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), frequency);
    if (it == nodes_.end() || *it != frequency)
        throw std::out_of_range("flow closure: frequency not in closure");
    return std::size_t(it - nodes_.begin());
}

std::optional<std::uint64_t> FlowClosure::next(std::uint64_t frequency) const {
    auto it = edges_.find(frequency);
    if (it == edges_.end()) return std::nullopt;
    return it->second;
}

Complex CycleModeDecomposition::eval(double t) const {
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < lambdas.size(); ++j)
        acc += coefficients[j] * std::exp(lambdas[j] * t);
    return acc;
}

Complex CycleModeDecomposition::eval_derivative(double t, unsigned order) const {
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        Complex lam_pow{1.0, 0.0};
        for (unsigned q = 0; q < order; ++q) lam_pow *= lambdas[j];
        acc += coefficients[j] * lam_pow * std::exp(lambdas[j] * t);
    }
    return acc;
}

namespace {

/// d_j = (1/m) sum_p x_p exp(-2 pi i p j / m): the phase-0 mode coefficients
/// of a cycle with initial data x
std::vector<Complex> cycle_dft(const std::vector<std::uint64_t>& cycle,
                               const SpectralState& initial) {
    const std::uint64_t m = cycle.size();
    std::vector<Complex> d(m, Complex{0.0, 0.0});
    for (std::uint64_t j = 0; j < m; ++j) {
        for (std::uint64_t p = 0; p < m; ++p)
            d[j] += initial.at(cycle[p]) * root_inverse_power(j, p, m);
        d[j] /= double(m);
    }
    return d;
}

}  // namespace

CycleModeDecomposition cycle_modes(const FlowClosure& closure, const SpectralState& initial,
                                   std::uint64_t frequency) {
    const auto& meta = closure.meta(frequency);
    if (meta.ell != 0)
        throw std::invalid_argument("cycle_modes: frequency is not on a cycle");
    const auto& cycle = closure.cycles()[meta.cycle_id];
    const std::vector<Complex> d = cycle_dft(cycle, initial);
    const std::uint64_t m = meta.cycle_length;
    CycleModeDecomposition modes;
    modes.cycle_length = m;
    for (std::uint64_t j = 0; j < m; ++j) {
        modes.lambdas.push_back(root_of_unity(j, m));
        modes.coefficients.push_back(d[j] * root_of_unity(meta.cycle_phase * j, m));
    }
    return modes;
}

SpectralState solve_closed_form(const FlowClosure& closure, const SpectralState& initial,
                                double t) {
    if (!closure.fully_resolved())
        throw std::invalid_argument(
            "solve_closed_form: closure has frequencies without orbit metadata");

    std::vector<std::vector<Complex>> dft;
    dft.reserve(closure.cycles().size());
    for (const auto& cycle : closure.cycles()) dft.push_back(cycle_dft(cycle, initial));

    SpectralState out(closure.params());
    out.time = t;
    for (const std::uint64_t n : closure.nodes()) {
        const auto& meta = closure.meta(n);
        const std::uint64_t m = meta.cycle_length;
        const auto& d = dft[meta.cycle_id];

        // Modes of the entry node (phase rotation of the phase-0 DFT data).
        std::vector<Complex> c(m);
        for (std::uint64_t j = 0; j < m; ++j)
            c[j] = d[j] * root_of_unity(meta.cycle_phase * j, m);

        Complex value{0.0, 0.0};
        if (meta.ell == 0) {
            for (std::uint64_t j = 0; j < m; ++j)
                value += c[j] * std::exp(root_of_unity(j, m) * t);
        } else {
            const std::uint64_t ell = meta.ell;
            // Initial data along the chain n -> C(n) -> ... (ell nodes).
            std::vector<Complex> chain(ell);
            std::uint64_t x = n;
            for (std::uint64_t kk = 0; kk < ell; ++kk) {
                chain[kk] = initial.at(x);
                x = *closure.next(x);
            }
            // Exponential tail sum_j c_j lambda_j^{-ell} e^{lambda_j t}.
            for (std::uint64_t j = 0; j < m; ++j)
                value += c[j] * root_inverse_power(j, ell, m) * std::exp(root_of_unity(j, m) * t);
            // Polynomial part sum_k (chain_k - sum_j c_j lambda_j^{-(ell-k)}) t^k / k!.
            double t_pow_over_fact = 1.0;
            for (std::uint64_t kk = 0; kk < ell; ++kk) {
                Complex coeff = chain[kk];
                for (std::uint64_t j = 0; j < m; ++j)
                    coeff -= c[j] * root_inverse_power(j, ell - kk, m);
                value += coeff * t_pow_over_fact;
                t_pow_over_fact *= t / double(kk + 1);
            }
        }
        out.amplitudes[n] = value;
    }
    return out;
}

namespace {

std::vector<Complex> state_to_vector(const FlowClosure& closure, const SpectralState& initial) {
    std::vector<Complex> x(closure.nodes().size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = initial.at(closure.nodes()[i]);
    return x;
}

std::vector<std::size_t> successor_indices(const FlowClosure& closure) {
    constexpr std::size_t kTerminal = SIZE_MAX;
    std::vector<std::size_t> succ(closure.nodes().size(), kTerminal);
    for (std::size_t i = 0; i < succ.size(); ++i)
        if (auto nx = closure.next(closure.nodes()[i])) succ[i] = closure.index_of(*nx);
    return succ;
}

void derivative(const std::vector<std::size_t>& succ, const std::vector<Complex>& x,
                std::vector<Complex>& dx) {
    for (std::size_t i = 0; i < x.size(); ++i)
        dx[i] = succ[i] == SIZE_MAX ? Complex{0.0, 0.0} : x[succ[i]];
}

}  // namespace

SpectralState solve_numerical(const FlowClosure& closure, const SpectralState& initial,
                              double t, Scheme scheme, double dt, double picard_tol,
                              unsigned picard_max_iter) {
    if (t < 0.0) throw std::invalid_argument("solve_numerical: t must be >= 0");
    if (dt <= 0.0) throw std::invalid_argument("solve_numerical: dt must be > 0");

    const auto succ = successor_indices(closure);
    std::vector<Complex> x = state_to_vector(closure, initial);
    const std::size_t dim = x.size();

    if (scheme == Scheme::rk4) {
        std::vector<Complex> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
        double remaining = t;
        while (remaining > 0.0) {
            const double h = std::min(dt, remaining);
            derivative(succ, x, k1);
            for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
            derivative(succ, tmp, k2);
            for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
            derivative(succ, tmp, k3);
            for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + h * k3[i];
            derivative(succ, tmp, k4);
            for (std::size_t i = 0; i < dim; ++i)
                x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            remaining -= h;
        }
    } else {
        // Picard on subintervals of length < 1/2: each sweep of the integral
        // map adds one Taylor term of exp(hA); the sweep increments shrink
        // geometrically because sqrt(2)*h < 1.
        constexpr double kSubinterval = 0.4;
        double remaining = t;
        std::vector<Complex> term(dim), next_term(dim), acc(dim);
        while (remaining > 0.0) {
            const double h = std::min(kSubinterval, remaining);
            term = x;
            acc = x;
            bool converged = false;
            for (unsigned q = 1; q <= picard_max_iter; ++q) {
                derivative(succ, term, next_term);
                double max_abs = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    next_term[i] *= h / double(q);
                    acc[i] += next_term[i];
                    max_abs = std::max(max_abs, std::abs(next_term[i]));
                }
                term.swap(next_term);
                if (max_abs <= picard_tol) {
                    converged = true;
                    break;
                }
            }
            if (!converged) throw PicardNotConverged();
            x = acc;
            remaining -= h;
        }
    }

    SpectralState out(closure.params());
    out.time = t;
    for (std::size_t i = 0; i < dim; ++i) out.amplitudes[closure.nodes()[i]] = x[i];
    return out;
}

GrowthReport growth_monitor(const FlowClosure& closure, const SpectralState& initial,
                            const std::vector<double>& t_grid, double slack) {
    const double norm0 = initial.norm();
    GrowthReport report;
    for (const double t : t_grid) {
        if (t < 0.0) throw std::invalid_argument("growth_monitor: t must be >= 0");
        const SpectralState u = solve_closed_form(closure, initial, t);
        GrowthReport::Row row;
        row.t = t;
        row.windowed_norm = u.norm();
        row.bound = std::exp(std::sqrt(2.0) * t) * norm0;
        row.within = row.windowed_norm <= row.bound * (1.0 + slack);
        report.all_within = report.all_within && row.within;
        report.rows.push_back(row);
    }
    return report;
}

double bessel_i0(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (unsigned j = 1; j < 1000; ++j) {
        term *= q / (double(j) * double(j));
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

DeltaProbeReport delta_probe(const CollatzParams& params, std::uint64_t pivot,
                             std::uint64_t window_max, const std::vector<double>& t_grid,
                             std::uint64_t max_steps) {
    DeltaProbeReport report;
    report.pivot = pivot;
    report.window_max = window_max;

    const Int value_cap = pow2(200);  // orbits are step-bounded; values may roam
    for (std::uint64_t k = 1; k <= window_max; ++k) {
        const OrbitRecord rec = orbit(params, Int(k), max_steps, value_cap);
        if (rec.terminated_by != OrbitTermination::cycle_found)
            throw std::invalid_argument("delta_probe: orbit of " + std::to_string(k) +
                                        " did not close within the step budget");
        for (std::size_t step = 0; step < rec.values.size(); ++step) {
            if (rec.values[step] == pivot) {
                report.hitting_steps[k] = step;
                break;
            }
        }
    }

    for (const double t : t_grid) {
        DeltaProbeReport::Row row;
        row.t = t;
        for (const auto& [k, mk] : report.hitting_steps) {
            // |t^m / m!|^2 without overflow, via exp/lgamma.
            double amp_sq;
            if (mk == 0)
                amp_sq = 1.0;
            else if (t == 0.0)
                amp_sq = 0.0;
            else
                amp_sq = std::exp(2.0 * (double(mk) * std::log(t) - std::lgamma(double(mk) + 1.0)));
            row.windowed_norm_sq += amp_sq;
        }
        row.bessel_bound = bessel_i0(2.0 * std::sqrt(2.0) * t);
        row.within = row.windowed_norm_sq <= row.bessel_bound * (1.0 + 1e-12);
        report.all_within = report.all_within && row.within;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace collatzflow
