#pragma once

// The Collatz operator on square-summable sequences, (Cu)_n = u_{C(n)}, its
// adjoint, and the linear flow  d/dt u_n = u_{C(n)}  restricted to a finite
// forward-closed set of frequencies. Coordinates on an m-cycle evolve as
// combinations of e^{lambda t} with lambda the m-th roots of unity; a
// coordinate ell steps away from its cycle adds a degree-(ell-1) polynomial.
// The flow obeys ||u(t)|| <= e^{sqrt(2) t} ||u(0)||.
//
// Frequencies are restricted to n >= 1: the odd-symmetry extension makes
// negative coordinates mirror images, so nothing is lost.

#include "collatzflow/collatz_map.hpp"
#include "collatzflow/numeric.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace collatzflow {

using Complex = std::complex<double>;

/// Finitely supported frequency-to-amplitude mapping (absent key = zero).
struct SpectralState {
    CollatzParams params;
    double time = 0.0;
    std::map<std::uint64_t, Complex> amplitudes;

    explicit SpectralState(CollatzParams p) : params(std::move(p)) {}

    Complex at(std::uint64_t frequency) const {
        auto it = amplitudes.find(frequency);
        return it == amplitudes.end() ? Complex{0.0, 0.0} : it->second;
    }

    void set(std::uint64_t frequency, Complex amplitude) {
        if (frequency < 1) throw std::invalid_argument("SpectralState: frequencies start at 1");
        amplitudes[frequency] = amplitude;
    }

    double norm_sq() const;
    double norm() const;
};

SpectralState make_delta(const CollatzParams& params, std::uint64_t frequency);
SpectralState make_ones(const CollatzParams& params, const std::vector<std::uint64_t>& freqs);

/// <u, v> = sum u_n * conj(v_n).
Complex inner_product(const SpectralState& u, const SpectralState& v);

/// The preimages of m under C within the positive integers: always 2m, plus
/// (2m-beta)/alpha when that is a positive integer (it is then odd
/// automatically). The congruence 2m = beta (mod alpha) alone is not enough:
/// 2m > beta is also required (e.g. alpha=3, beta=5, m=1 has only one
/// preimage).
struct Preimages {
    std::uint64_t even;
    std::optional<std::uint64_t> odd;
};
Preimages preimages(const CollatzParams& params, std::uint64_t m);

/// True when m has two preimages; such frequencies double their contribution
/// to ||C u||^2.
bool has_second_preimage(const CollatzParams& params, std::uint64_t m);

/// (Cu)_n = u_{C(n)}: support of the output is the full preimage set of the
/// input support.
SpectralState apply_operator(const SpectralState& state);

/// (C*u)_f = sum over n with C(n) = f of u_n; exact cancellations are pruned
/// from the support.
SpectralState apply_adjoint(const SpectralState& state);

/// Sandwich ||u|| <= ||Cu|| <= sqrt(2)||u|| for every state, with equality on
/// the left for states supported on single-preimage frequencies and on the
/// right for states supported on double-preimage frequencies.
struct NormCertificate {
    double norm_u = 0.0;
    double norm_Cu = 0.0;
    bool sandwich_ok = false;
    enum class Support { empty, single_preimage, double_preimage, mixed } support;
    bool equality_ok = false;  // vacuously true for mixed support
};
std::vector<NormCertificate> norm_certificates(const CollatzParams& params,
                                               const std::vector<SpectralState>& test_states,
                                               double tol = 1e-12);

/// {e_n - e_{alpha n + beta} : n odd, n <= n_max} — an orthogonal family
/// annihilated by the adjoint.
std::vector<SpectralState> adjoint_kernel_basis(const CollatzParams& params,
                                                std::uint64_t n_max);

/// Thrown when a window orbit exhausts its budget before closing (possible
/// for alpha >= 5): the coupled system is then not finite and neither solver
/// applies.
struct BudgetExhausted : std::runtime_error {
    std::uint64_t frequency;
    explicit BudgetExhausted(std::uint64_t f)
        : std::runtime_error("flow closure: orbit of frequency " + std::to_string(f) +
                             " exhausted its budget before closing"),
          frequency(f) {}
};

/// A window of frequencies together with every forward-orbit frequency it
/// couples to, the restriction of C to that set, and per-frequency orbit
/// metadata (steps to cycle, cycle length, phase of the entry node).
class FlowClosure {
public:
    struct OrbitMeta {
        std::uint64_t ell = 0;           // steps until the first on-cycle node
        std::uint64_t cycle_length = 0;
        std::uint64_t cycle_phase = 0;   // phase of that first on-cycle node
        std::size_t cycle_id = 0;
    };

    static FlowClosure build(const CollatzParams& params, std::vector<std::uint64_t> window,
                             std::uint64_t max_steps = 1u << 20,
                             std::uint64_t max_value = std::uint64_t(1) << 62);

    /// A truncated path f0 -> f1 -> ... -> fN with no outgoing edge at fN
    /// (its coordinate is frozen: d/dt u_{fN} = 0). Models the finite
    /// truncation of a divergent orbit; carries no orbit metadata, so only
    /// the numerical solver accepts it.
    static FlowClosure synthetic_chain(const CollatzParams& params,
                                       std::vector<std::uint64_t> path);

    const CollatzParams& params() const { return params_; }
    const std::vector<std::uint64_t>& window() const { return window_; }
    const std::vector<std::uint64_t>& nodes() const { return nodes_; }  // sorted
    std::size_t index_of(std::uint64_t frequency) const;
    std::optional<std::uint64_t> next(std::uint64_t frequency) const;
    bool has_meta(std::uint64_t frequency) const { return meta_.count(frequency) != 0; }
    const OrbitMeta& meta(std::uint64_t frequency) const { return meta_.at(frequency); }
    /// cycle_id -> nodes in phase order (C maps phase p to phase p+1 mod m).
    const std::vector<std::vector<std::uint64_t>>& cycles() const { return cycles_; }
    bool fully_resolved() const { return meta_.size() == nodes_.size(); }

private:
    FlowClosure(CollatzParams params) : params_(std::move(params)) {}

    CollatzParams params_;
    std::vector<std::uint64_t> window_;
    std::vector<std::uint64_t> nodes_;
    std::map<std::uint64_t, std::uint64_t> edges_;
    std::map<std::uint64_t, OrbitMeta> meta_;
    std::vector<std::vector<std::uint64_t>> cycles_;
};

/// Exponential modes of one coordinate on an m-cycle: u(t) = sum_j c_j
/// e^{lambda_j t} with lambda_j = exp(2 pi i j / m), so lambda_j^m = 1 and
/// |lambda_j| = 1. The c_j are the discrete Fourier transform of the cycle's
/// initial data, rotated to the coordinate's phase.
struct CycleModeDecomposition {
    std::uint64_t cycle_length = 0;
    std::vector<Complex> lambdas;
    std::vector<Complex> coefficients;

    Complex eval(double t) const;
    Complex eval_derivative(double t, unsigned order) const;
};

/// Modes of `frequency` (which must lie on a cycle of the closure) under the
/// given initial data.
CycleModeDecomposition cycle_modes(const FlowClosure& closure, const SpectralState& initial,
                                   std::uint64_t frequency);

/// Exact solution at time t on every closure coordinate: cycle coordinates
/// by circulant (roots-of-unity) diagonalization, off-cycle coordinates by
/// the unrolled polynomial-plus-exponential form. Requires fully_resolved().
SpectralState solve_closed_form(const FlowClosure& closure, const SpectralState& initial,
                                double t);

enum class Scheme { rk4, picard };

struct PicardNotConverged : std::runtime_error {
    PicardNotConverged()
        : std::runtime_error("picard iteration did not reach the fixed-point tolerance") {}
};

/// Numerical integration of the closure system. rk4 is classical fourth
/// order with step dt; picard iterates the integral map u -> u0 + int C(u)
/// on subintervals of length 0.4 (< 1/2, where the map is a contraction)
/// until successive iterates differ by less than picard_tol.
SpectralState solve_numerical(const FlowClosure& closure, const SpectralState& initial,
                              double t, Scheme scheme, double dt = 1e-3,
                              double picard_tol = 1e-13, unsigned picard_max_iter = 500);

/// Norm-vs-bound table for the flow: the closure norm (a lower bound on the
/// full l^2 norm, whose support is generally infinite) against
/// e^{sqrt(2) t} ||u0||.
struct GrowthReport {
    struct Row {
        double t = 0.0;
        double windowed_norm = 0.0;
        double bound = 0.0;
        bool within = false;
    };
    std::vector<Row> rows;
    bool all_within = true;
};
GrowthReport growth_monitor(const FlowClosure& closure, const SpectralState& initial,
                            const std::vector<double>& t_grid, double slack = 1e-9);

/// Initial data delta_pivot: each frequency k whose orbit hits the pivot
/// after m_k steps evolves as u_k(t) = t^{m_k} / m_k!. The probe reports the
/// squared norm over k <= window_max against the Bessel bound I0(2 sqrt(2) t)
/// (each depth-d preimage level has at most 2^d members).
struct DeltaProbeReport {
    std::uint64_t pivot = 0;
    std::uint64_t window_max = 0;
    std::map<std::uint64_t, std::uint64_t> hitting_steps;  // k -> m_k, hits only
    struct Row {
        double t = 0.0;
        double windowed_norm_sq = 0.0;
        double bessel_bound = 0.0;
        bool within = false;
    };
    std::vector<Row> rows;
    bool all_within = true;
};
DeltaProbeReport delta_probe(const CollatzParams& params, std::uint64_t pivot,
                             std::uint64_t window_max, const std::vector<double>& t_grid,
                             std::uint64_t max_steps = 1u << 16);

/// Modified Bessel function of the first kind, order zero, by its power
/// series summed to machine convergence.
double bessel_i0(double x);

}  // namespace collatzflow
