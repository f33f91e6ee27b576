#pragma once

// The full identity suite: every library-level invariant run over a
// parameter grid, with exact arithmetic where the identity is exact and
// pinned float tolerances where the flow solvers are involved. The CLI
// `verify` subcommand and the acceptance binary both drive this.

#include "collatzflow/collatz_map.hpp"
#include "collatzflow/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace collatzflow {

struct VerifyConfig {
    std::vector<std::pair<unsigned, unsigned>> param_grid = {
        {1, 1}, {3, 1}, {5, 1}, {3, 5}, {7, 3}};

    // energy family (conservation, shift/brackets, pseudo-virial)
    std::uint64_t energy_n_max = 10000;
    unsigned energy_k_max = 12;
    unsigned shift_m_max = 8;

    // coefficient tables
    unsigned coeff_k_max = 20;
    unsigned coeff_beta_sweep_k = 12;

    // affine decomposition sweep (exhaustive n <= 2^(k+2) per k)
    unsigned affine_k_max = 12;

    // parity vectors
    unsigned parity_k_max = 16;

    // discrete derivative
    unsigned deriv_m_max = 10;

    // spectral checks
    std::size_t random_states = 1000;
    std::uint64_t kernel_n_max = 1000;
    double algebra_tol = 1e-12;
    double solver_tol = 1e-9;
    double solver_dt = 1e-3;
    std::uint64_t solver_window_max = 64;
    std::vector<double> solver_times = {0.5, 1.0, 2.0};
    std::uint64_t probe_window = 10000;
    std::vector<double> probe_times = {0.5, 1.0, 2.0};

    std::uint64_t rng_seed = 0x20260809ull;

    static VerifyConfig defaults() { return {}; }
    /// Reduced grid for smoke runs (seconds, not minutes).
    static VerifyConfig quick();
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string witness;  // empty on pass
    double elapsed_ms = 0.0;
};

struct VerificationCertificate {
    std::string suite_version;
    std::vector<std::pair<unsigned, unsigned>> param_grid;
    std::vector<CheckResult> checks;

    bool all_pass() const;
};

/// Runs every check; when `progress` is given, prints one line per check as
/// it completes.
VerificationCertificate run_verification(const VerifyConfig& config,
                                         std::ostream* progress = nullptr);

Json certificate_json(const VerificationCertificate& cert);
Table certificate_table(const VerificationCertificate& cert);

}  // namespace collatzflow
