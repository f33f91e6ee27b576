#include "collatzflow/verify.hpp"

#include "collatzflow/coeff_table.hpp"
#include "collatzflow/derivative.hpp"
#include "collatzflow/energy.hpp"
#include "collatzflow/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

namespace collatzflow {

namespace {

constexpr const char* kSuiteVersion = "1.0.0";

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string pair_tag(const CollatzParams& params) {
    return "alpha=" + params.alpha.str() + " beta=" + params.beta.str();
}

class CheckRunner {
public:
    CheckRunner(std::ostream* progress) : progress_(progress) {}

    /// body returns an empty string on pass, a witness on failure.
    template <typename Body>
    void run(const std::string& name, Body&& body) {
        CheckResult result;
        result.name = name;
        const auto start = Clock::now();
        try {
            result.witness = body();
            result.pass = result.witness.empty();
        } catch (const std::exception& e) {
            result.pass = false;
            result.witness = e.what();
        }
        result.elapsed_ms = ms_since(start);
        report(result);
    }

    void report(CheckResult result) {
        if (progress_)
            *progress_ << (result.pass ? "[PASS] " : "[FAIL] ") << result.name
                       << (result.witness.empty() ? "" : "  (" + result.witness + ")")
                       << std::endl;
        results_.push_back(std::move(result));
    }

    std::vector<CheckResult> take() { return std::move(results_); }

private:
    std::ostream* progress_;
    std::vector<CheckResult> results_;
};

SpectralState random_state(const CollatzParams& params, std::mt19937_64& rng,
                           std::uint64_t max_freq, std::size_t support) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    SpectralState s(params);
    for (std::size_t i = 0; i < support; ++i)
        s.set(1 + rng() % max_freq, {amp(rng), amp(rng)});
    return s;
}

SpectralState random_state_from(const CollatzParams& params, std::mt19937_64& rng,
                                const std::vector<std::uint64_t>& freqs, std::size_t support) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    SpectralState s(params);
    for (std::size_t i = 0; i < support; ++i)
        s.set(freqs[rng() % freqs.size()], {amp(rng), amp(rng)});
    return s;
}

// --- criteria 1, 6, 7: one sweep over the shared C^k grids ----------------

struct EnergyFamilyResults {
    CheckResult energy;
    CheckResult shift;
    CheckResult virial;
};

EnergyFamilyResults run_energy_family(const VerifyConfig& cfg) {
    const auto start = Clock::now();
    std::string w_energy, w_shift, w_virial;

    for (const auto& [a, b] : cfg.param_grid) {
        const CollatzParams params{a, b};
        for (unsigned k = 1; k <= cfg.energy_k_max; ++k) {
            const EnergyGrid grid(params, k, cfg.energy_n_max, cfg.shift_m_max);
            const Int target = pow_int(params.alpha + 1, k);
            const Rat virial_target(target, pow_int(4, k));
            const SkBrackets brackets(params, k);
            const std::string tag = pair_tag(params) + " k=" + std::to_string(k);

            for (std::uint64_t n = 1; n <= cfg.energy_n_max; ++n) {
                if (w_energy.empty() && grid.energy(n) != target)
                    w_energy = tag + " n=" + std::to_string(n) + ": energy sum != (1+alpha)^k";
                if (w_shift.empty()) {
                    const Int sk = grid.s_k(n);
                    for (unsigned m = 0; m <= cfg.shift_m_max; ++m) {
                        if (grid.s_km(n, m) - sk != Int(m) * target) {
                            w_shift = tag + " n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                      ": s_km - s_k != m(1+alpha)^k";
                            break;
                        }
                    }
                    if (w_shift.empty() && !brackets.contains(Int(n), sk))
                        w_shift = tag + " n=" + std::to_string(n) + ": s_k escaped its brackets";
                }
                if (w_virial.empty() && grid.pseudo_virial(n) != virial_target)
                    w_virial = tag + " n=" + std::to_string(n) + ": pseudo-virial != ((1+alpha)/4)^k";
            }
        }
    }

    const double elapsed = ms_since(start);
    auto make = [&](const char* name, const std::string& witness) {
        CheckResult r;
        r.name = name;
        r.pass = witness.empty();
        r.witness = witness;
        r.elapsed_ms = elapsed / 3.0;
        return r;
    };
    return {make("01-energy-conservation", w_energy), make("06-shift-identity-brackets", w_shift),
            make("07-pseudo-virial", w_virial)};
}

// --- criterion 2 -----------------------------------------------------------

std::string check_coefficient_sums(const VerifyConfig& cfg) {
    for (const auto& [a, b] : cfg.param_grid) {
        const CollatzParams params{a, b};
        for (unsigned k = 1; k <= cfg.coeff_k_max; ++k) {
            const auto table = CoeffTable::build(params, k);
            table.coeff_sums();  // throws on closed-form mismatch
        }
    }

    // a-tables do not depend on beta.
    std::vector<unsigned> alphas;
    for (const auto& [a, b] : cfg.param_grid)
        if (std::find(alphas.begin(), alphas.end(), a) == alphas.end()) alphas.push_back(a);
    for (const unsigned a : alphas) {
        std::vector<CoeffTable> tables;
        for (unsigned beta : {1u, 3u, 5u}) {
            if (std::gcd(a, beta) != 1) continue;  // params require coprimality
            tables.push_back(CoeffTable::build(CollatzParams{a, beta}, cfg.coeff_beta_sweep_k));
        }
        for (std::size_t i = 1; i < tables.size(); ++i)
            if (tables[i].a_all() != tables[0].a_all())
                return "alpha=" + std::to_string(a) + " k=" +
                       std::to_string(cfg.coeff_beta_sweep_k) + ": a-table depends on beta";
    }
    return "";
}

// --- criterion 3 -----------------------------------------------------------

std::string check_affine_decomposition(const VerifyConfig& cfg) {
    for (const auto& [a, b] : cfg.param_grid) {
        const CollatzParams params{a, b};
        for (unsigned k = 1; k <= cfg.affine_k_max; ++k) {
            const auto table = CoeffTable::build(params, k);
            if (const auto fail = verify_mod_decomposition(table, 8))
                return pair_tag(params) + " k=" + std::to_string(k) + " n=" + fail->n.str() +
                       ": 2^k C^k(n) = " + fail->lhs.str() + " != " + fail->rhs.str();
        }
    }
    return "";
}

// --- criterion 4 -----------------------------------------------------------

std::string check_parity_bijection(const VerifyConfig& cfg) {
    for (const auto& [a, b] : cfg.param_grid) {
        const CollatzParams params{a, b};
        for (unsigned k = 1; k <= cfg.parity_k_max; ++k) {
            const auto res = parity_bijection_check(params, k);
            if (!res.bijective)
                return pair_tag(params) + " k=" + std::to_string(k) + ": collision " +
                       std::to_string(res.colliding_a) + " vs " + std::to_string(res.colliding_b);
        }
    }
    // The alpha=5 worked example, verbatim.
    const CollatzParams p51{5, 1};
    const std::vector<std::string> expected = {"110", "011", "100", "001",
                                               "111", "010", "101", "000"};
    for (std::uint64_t n = 1; n <= 8; ++n)
        if (parity_vector(p51, Int(n), 3).to_string() != expected[n - 1])
            return "alpha=5 beta=1: parity vector of n=" + std::to_string(n) +
                   " differs from the worked example";
    return "";
}

// --- criterion 5 -----------------------------------------------------------

std::string check_derivative_sums(const VerifyConfig& cfg) {
    for (const auto& [a, b] : cfg.param_grid) {
        const CollatzParams params{a, b};
        for (unsigned m = 1; m <= cfg.deriv_m_max; ++m) {
            const auto decomp = DerivativeDecomposition::build(params, m);
            const std::string tag = pair_tag(params) + " m=" + std::to_string(m);
            if (decomp.n_coeff_sum() != derivative_n_sum_closed_form(params, m))
                return tag + ": n-coefficient sum != (alpha-3)^m";
            if (decomp.free_coeff_sum() != derivative_free_sum_closed_form(params, m))
                return tag + ": free-coefficient sum != beta(alpha-3)^(m-1)";
            if (params.alpha == 3) {
                // (alpha-3)^m vanishes for every m >= 1; the free sum equals
                // beta*(alpha-3)^(m-1), which is beta at m=1 and 0 from m=2 on.
                if (decomp.n_coeff_sum() != 0) return tag + ": n-coefficient sum != 0";
                const Int expected_free = (m == 1) ? params.beta : Int(0);
                if (decomp.free_coeff_sum() != expected_free)
                    return tag + ": free-coefficient sum != " + expected_free.str();
            }
        }
    }
    return "";
}

// --- criterion 8 -----------------------------------------------------------

std::string check_operator_sandwich(const VerifyConfig& cfg) {
    std::mt19937_64 rng(cfg.rng_seed);
    for (const auto& [a, b] : cfg.param_grid) {
        const CollatzParams params{a, b};

        std::vector<std::uint64_t> single, dble;
        for (std::uint64_t f = 1; f <= 100000 && (single.size() < 400 || dble.size() < 400); ++f)
            (has_second_preimage(params, f) ? dble : single).push_back(f);

        std::vector<SpectralState> states;
        const std::size_t per_pair = std::max<std::size_t>(cfg.random_states / cfg.param_grid.size(), 4);
        for (std::size_t i = 0; i < per_pair; ++i)
            states.push_back(random_state(params, rng, 1000000, 1 + rng() % 12));
        // Equality classes: states supported on single-/double-preimage
        // frequencies only. For alpha=1 every frequency has two preimages,
        // so the single-preimage family is empty there.
        for (std::size_t i = 0; i < per_pair / 4; ++i) {
            if (!single.empty())
                states.push_back(random_state_from(params, rng, single, 1 + rng() % 8));
            if (!dble.empty())
                states.push_back(random_state_from(params, rng, dble, 1 + rng() % 8));
        }
        states.push_back(SpectralState(params));  // zero state

        for (const auto& cert : norm_certificates(params, states, cfg.algebra_tol)) {
            if (!cert.sandwich_ok)
                return pair_tag(params) + ": sandwich violated (||u||=" +
                       std::to_string(cert.norm_u) + ", ||Cu||=" + std::to_string(cert.norm_Cu) +
                       ")";
            if (!cert.equality_ok)
                return pair_tag(params) + ": S/T norm equality violated (||u||=" +
                       std::to_string(cert.norm_u) + ", ||Cu||=" + std::to_string(cert.norm_Cu) +
                       ")";
        }
    }
    return "";
}

// --- criterion 9 -----------------------------------------------------------

std::string check_adjoint_kernel(const VerifyConfig& cfg) {
    std::mt19937_64 rng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ull);
    for (const auto& [a, b] : cfg.param_grid) {
        const CollatzParams params{a, b};

        const std::size_t pairs = std::max<std::size_t>(cfg.random_states / cfg.param_grid.size(), 4);
        for (std::size_t i = 0; i < pairs; ++i) {
            const auto u = random_state(params, rng, 1000000, 1 + rng() % 12);
            const auto v = random_state(params, rng, 1000000, 1 + rng() % 12);
            const Complex lhs = inner_product(apply_operator(u), v);
            const Complex rhs = inner_product(u, apply_adjoint(v));
            const double scale = std::max(1.0, u.norm() * v.norm());
            if (std::abs(lhs - rhs) > cfg.algebra_tol * scale)
                return pair_tag(params) + ": <Cu,v> != <u,C*v>";
        }

        const auto basis = adjoint_kernel_basis(params, cfg.kernel_n_max);
        for (const auto& e : basis)
            if (!apply_adjoint(e).amplitudes.empty())
                return pair_tag(params) + ": kernel element not annihilated exactly";
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = i + 1; j < basis.size(); ++j)
                if (inner_product(basis[i], basis[j]) != Complex{0.0, 0.0})
                    return pair_tag(params) + ": kernel basis not orthogonal";
    }
    return "";
}

// --- criteria 10, 11 -------------------------------------------------------

std::string check_solver_agreement(const VerifyConfig& cfg) {
    std::mt19937_64 rng(cfg.rng_seed ^ 0xda3e39cb94b95bdbull);
    for (const auto& [a, b] : {std::pair<unsigned, unsigned>{3, 1}, {1, 1}}) {
        const CollatzParams params{a, b};
        std::vector<std::uint64_t> window(cfg.solver_window_max);
        for (std::uint64_t f = 1; f <= cfg.solver_window_max; ++f) window[f - 1] = f;
        const auto closure = FlowClosure::build(params, window);
        const auto initial = random_state_from(params, rng, window, window.size());

        for (const double t : cfg.solver_times) {
            const auto closed = solve_closed_form(closure, initial, t);
            const auto rk4 = solve_numerical(closure, initial, t, Scheme::rk4, cfg.solver_dt);
            for (const auto f : closure.nodes()) {
                const double diff = std::abs(closed.at(f) - rk4.at(f));
                if (diff > cfg.solver_tol)
                    return pair_tag(params) + " t=" + std::to_string(t) + " frequency " +
                           std::to_string(f) + ": |closed - rk4| = " + std::to_string(diff);
            }
        }
    }
    return "";
}

std::string check_growth_bound(const VerifyConfig& cfg) {
    std::mt19937_64 rng(cfg.rng_seed ^ 0xda3e39cb94b95bdbull);  // same flows as criterion 10
    for (const auto& [a, b] : {std::pair<unsigned, unsigned>{3, 1}, {1, 1}}) {
        const CollatzParams params{a, b};
        std::vector<std::uint64_t> window(cfg.solver_window_max);
        for (std::uint64_t f = 1; f <= cfg.solver_window_max; ++f) window[f - 1] = f;
        const auto closure = FlowClosure::build(params, window);
        const auto initial = random_state_from(params, rng, window, window.size());
        const auto report = growth_monitor(closure, initial, cfg.solver_times, 1e-9);
        if (!report.all_within) return pair_tag(params) + ": windowed norm exceeded e^{sqrt(2)t}";
    }

    // The trivial-cycle indicator evolves at the saturating rate 1 < sqrt(2).
    const CollatzParams p31{3, 1};
    const auto closure = FlowClosure::build(p31, {1, 2});
    const auto ones = make_ones(p31, {1, 2});
    for (const double t : cfg.solver_times) {
        const auto u = solve_closed_form(closure, ones, t);
        const double expected = std::exp(t);
        if (std::abs(u.at(1) - Complex{expected, 0.0}) > cfg.solver_tol ||
            std::abs(u.at(2) - Complex{expected, 0.0}) > cfg.solver_tol)
            return "e1+e2 did not evolve as e^t (e1+e2) at t=" + std::to_string(t);
    }
    const auto report = growth_monitor(closure, ones, cfg.solver_times, 1e-9);
    if (!report.all_within) return "e1+e2: windowed norm exceeded e^{sqrt(2)t}";
    return "";
}

// --- criterion 12 ----------------------------------------------------------

std::string check_delta_probe(const VerifyConfig& cfg) {
    const CollatzParams p31{3, 1};
    const auto report = delta_probe(p31, 5, cfg.probe_window, cfg.probe_times);

    const auto it = report.hitting_steps.find(13);
    if (it == report.hitting_steps.end() || it->second != 3)
        return "hitting time of 13 is not 3";
    // Cross-check u_13(t) = t^3/6 against the closed-form solver on the
    // closure of {13} with delta_5 initial data.
    const auto closure = FlowClosure::build(p31, {13});
    for (const double t : cfg.probe_times) {
        const auto u = solve_closed_form(closure, make_delta(p31, 5), t);
        if (std::abs(u.at(13) - Complex{t * t * t / 6.0, 0.0}) > cfg.solver_tol)
            return "u_13(t) != t^3/6 at t=" + std::to_string(t);
    }
    if (!report.all_within) return "windowed norm^2 exceeded I0(2 sqrt(2) t)";
    return "";
}

}  // namespace

VerifyConfig VerifyConfig::quick() {
    VerifyConfig cfg;
    cfg.energy_n_max = 400;
    cfg.energy_k_max = 8;
    cfg.shift_m_max = 4;
    cfg.coeff_k_max = 10;
    cfg.coeff_beta_sweep_k = 8;
    cfg.affine_k_max = 8;
    cfg.parity_k_max = 10;
    cfg.deriv_m_max = 6;
    cfg.random_states = 100;
    cfg.kernel_n_max = 200;
    cfg.solver_window_max = 32;
    cfg.probe_window = 500;
    return cfg;
}

bool VerificationCertificate::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

VerificationCertificate run_verification(const VerifyConfig& config, std::ostream* progress) {
    CheckRunner runner(progress);

    auto family = run_energy_family(config);
    runner.report(family.energy);
    runner.run("02-coefficient-sums", [&] { return check_coefficient_sums(config); });
    runner.run("03-affine-decomposition", [&] { return check_affine_decomposition(config); });
    runner.run("04-parity-bijection", [&] { return check_parity_bijection(config); });
    runner.run("05-derivative-sums", [&] { return check_derivative_sums(config); });
    runner.report(family.shift);
    runner.report(family.virial);
    runner.run("08-operator-sandwich", [&] { return check_operator_sandwich(config); });
    runner.run("09-adjoint-kernel", [&] { return check_adjoint_kernel(config); });
    runner.run("10-solver-agreement", [&] { return check_solver_agreement(config); });
    runner.run("11-growth-bound", [&] { return check_growth_bound(config); });
    runner.run("12-delta-probe", [&] { return check_delta_probe(config); });

    VerificationCertificate cert;
    cert.suite_version = kSuiteVersion;
    cert.param_grid = config.param_grid;
    cert.checks = runner.take();
    return cert;
}

Json certificate_json(const VerificationCertificate& cert) {
    Json grid = Json::array();
    for (const auto& [a, b] : cert.param_grid) grid.push_back(Json::array({a, b}));
    Json checks = Json::array();
    for (const auto& c : cert.checks) {
        Json entry{{"name", c.name},
                   {"status", c.pass ? "pass" : "fail"},
                   {"elapsed_ms", c.elapsed_ms}};
        if (!c.witness.empty()) entry["witness"] = c.witness;
        checks.push_back(entry);
    }
    return Json{{"suite_version", cert.suite_version}, {"param_grid", grid}, {"checks", checks}};
}

Table certificate_table(const VerificationCertificate& cert) {
    Table t{{"name", "status", "elapsed_ms", "witness"}, {}};
    for (const auto& c : cert.checks) {
        std::ostringstream ms;
        ms.precision(3);
        ms << std::fixed << c.elapsed_ms;
        t.rows.push_back({c.name, c.pass ? "pass" : "fail", ms.str(), c.witness});
    }
    return t;
}

}  // namespace collatzflow
