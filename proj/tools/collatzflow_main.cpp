// collatzflow: orbits, parity vectors, affine coefficient tables, energy
// sums, discrete derivatives and the spectral flow of the generalized
// accelerated Collatz map, with CSV/JSON output and a `verify` meta-command
// that runs the whole identity suite.
//
// Exit codes: 0 success, 1 invariant failure (witness printed), 2 invalid
// configuration.

#include "collatzflow/coeff_table.hpp"
#include "collatzflow/collatz_map.hpp"
#include "collatzflow/derivative.hpp"
#include "collatzflow/energy.hpp"
#include "collatzflow/io.hpp"
#include "collatzflow/spectral.hpp"
#include "collatzflow/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace collatzflow;

constexpr int kExitOk = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitBadConfig = 2;

struct OutputOptions {
    std::string format = "csv";
    std::string out_path;
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", opts.out_path,
                    "Output file (relative paths resolve under $COLLATZFLOW_OUTPUT_DIR)");
}

/// Writes to stdout, or to the file named by --out (resolved against
/// COLLATZFLOW_OUTPUT_DIR when relative).
void emit(const OutputOptions& opts, const std::string& payload) {
    if (opts.out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::filesystem::path path(opts.out_path);
    if (path.is_relative()) {
        if (const char* dir = std::getenv("COLLATZFLOW_OUTPUT_DIR")) path = dir / path;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << payload;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string render(const OutputOptions& opts, const Table& table, const Json& json) {
    return opts.format == "json" ? json.dump(2) + "\n" : to_csv(table);
}

struct ParamFlags {
    std::string alpha = "3";
    std::string beta = "1";
};

void add_param_flags(CLI::App* cmd, ParamFlags& flags) {
    cmd->add_option("--alpha", flags.alpha, "Odd multiplier of the odd branch")
        ->capture_default_str();
    cmd->add_option("--beta", flags.beta, "Odd offset of the odd branch")->capture_default_str();
}

CollatzParams make_params(const ParamFlags& flags) {
    return CollatzParams(Int(flags.alpha), Int(flags.beta));
}

std::vector<std::uint64_t> parse_window(const std::string& spec) {
    std::vector<std::uint64_t> window;
    if (const auto dots = spec.find(".."); dots != std::string::npos) {
        const std::uint64_t lo = std::stoull(spec.substr(0, dots));
        const std::uint64_t hi = std::stoull(spec.substr(dots + 2));
        if (lo < 1 || hi < lo) throw std::invalid_argument("bad window range: " + spec);
        for (std::uint64_t f = lo; f <= hi; ++f) window.push_back(f);
        return window;
    }
    if (spec.find(',') != std::string::npos) {
        std::size_t begin = 0;
        while (begin <= spec.size()) {
            const std::size_t end = spec.find(',', begin);
            const std::string part =
                end == std::string::npos ? spec.substr(begin) : spec.substr(begin, end - begin);
            window.push_back(std::stoull(part));
            if (end == std::string::npos) break;
            begin = end + 1;
        }
        return window;
    }
    // A single number W means the window {1..W}.
    const std::uint64_t w = std::stoull(spec);
    if (w < 1) throw std::invalid_argument("bad window: " + spec);
    for (std::uint64_t f = 1; f <= w; ++f) window.push_back(f);
    return window;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Exact dynamics and spectral flow of the generalized Collatz map"};
    app.require_subcommand(1);

    // --- orbit --------------------------------------------------------------
    auto* orbit_cmd = app.add_subcommand("orbit", "Forward orbit with cycle detection");
    ParamFlags orbit_params;
    OutputOptions orbit_out;
    std::string orbit_n;
    std::uint64_t orbit_max_steps = 1000000;
    std::string orbit_max_value;
    add_param_flags(orbit_cmd, orbit_params);
    orbit_cmd->add_option("--n", orbit_n, "Starting integer (arbitrary precision)")->required();
    orbit_cmd->add_option("--max-steps", orbit_max_steps, "Step budget")->capture_default_str();
    orbit_cmd->add_option("--max-value", orbit_max_value,
                          "Value budget (arbitrary precision; default 2^512)");
    add_output_options(orbit_cmd, orbit_out);

    // --- parity -------------------------------------------------------------
    auto* parity_cmd = app.add_subcommand("parity", "Parity vectors over [1, 2^k]");
    ParamFlags parity_params;
    OutputOptions parity_out;
    unsigned parity_k = 3;
    bool check_bijection = false;
    add_param_flags(parity_cmd, parity_params);
    parity_cmd->add_option("--k", parity_k, "Vector length")->required();
    parity_cmd->add_flag("--check-bijection", check_bijection,
                         "Verify all 2^k parity vectors are distinct");
    add_output_options(parity_cmd, parity_out);

    // --- coeffs -------------------------------------------------------------
    auto* coeffs_cmd = app.add_subcommand("coeffs", "Affine coefficient table for C^k");
    ParamFlags coeffs_params;
    OutputOptions coeffs_out;
    unsigned coeffs_k = 2;
    unsigned coeffs_budget = 24;
    bool coeffs_verify = false;
    add_param_flags(coeffs_cmd, coeffs_params);
    coeffs_cmd->add_option("--k", coeffs_k, "Iteration order")->required();
    coeffs_cmd->add_option("--table-budget", coeffs_budget, "Largest allowed k (2^k entries)")
        ->capture_default_str();
    coeffs_cmd->add_flag("--verify", coeffs_verify,
                         "Check the table against direct iteration and the sum identities");
    add_output_options(coeffs_cmd, coeffs_out);

    // --- energy -------------------------------------------------------------
    auto* energy_cmd = app.add_subcommand("energy", "Block sums, energy and pseudo-virial");
    ParamFlags energy_params;
    OutputOptions energy_out;
    std::string energy_n = "1";
    unsigned energy_k = 1;
    unsigned energy_m = 1;
    std::string energy_sweep;
    add_param_flags(energy_cmd, energy_params);
    energy_cmd->add_option("--n", energy_n, "Block start")->capture_default_str();
    energy_cmd->add_option("--k", energy_k, "Iteration order")->required();
    energy_cmd->add_option("--m", energy_m, "Shift in blocks of 2^k")->capture_default_str();
    energy_cmd->add_option("--sweep", energy_sweep, "Range n0..n1 of block starts");
    add_output_options(energy_cmd, energy_out);

    // --- deriv --------------------------------------------------------------
    auto* deriv_cmd = app.add_subcommand("deriv", "Discrete-derivative affine decomposition");
    ParamFlags deriv_params;
    OutputOptions deriv_out;
    unsigned deriv_m = 1;
    bool deriv_verify = false;
    add_param_flags(deriv_cmd, deriv_params);
    deriv_cmd->add_option("--m", deriv_m, "Derivative order")->required();
    deriv_cmd->add_flag("--verify", deriv_verify,
                        "Check the decomposition against direct iteration");
    add_output_options(deriv_cmd, deriv_out);

    // --- flow ---------------------------------------------------------------
    auto* flow_cmd = app.add_subcommand("flow", "Spectral flow du_n/dt = u_{C(n)}");
    ParamFlags flow_params;
    OutputOptions flow_out;
    std::string flow_init;
    double flow_t_max = 1.0;
    unsigned flow_t_steps = 10;
    std::string flow_scheme = "closed";
    double flow_dt = 1e-3;
    std::string flow_window;
    std::uint64_t flow_max_steps = 1u << 20;
    std::uint64_t flow_max_value = std::uint64_t(1) << 62;
    add_param_flags(flow_cmd, flow_params);
    flow_cmd->add_option("--init", flow_init, "Initial data: delta:5, ones:1,2 or list:3=1.0+0.5i,7=2.0")
        ->required();
    flow_cmd->add_option("--t-max", flow_t_max, "Final time")->capture_default_str();
    flow_cmd->add_option("--t-steps", flow_t_steps, "Grid points after t=0")->capture_default_str();
    flow_cmd->add_option("--scheme", flow_scheme, "Solver")
        ->check(CLI::IsMember({"closed", "rk4", "picard"}))
        ->capture_default_str();
    flow_cmd->add_option("--dt", flow_dt, "Step size for rk4")->capture_default_str();
    flow_cmd->add_option("--window", flow_window,
                         "Report window: W (meaning 1..W), a..b, or comma list; default: the "
                         "support of the initial data");
    flow_cmd->add_option("--max-steps", flow_max_steps, "Closure orbit step budget")
        ->capture_default_str();
    flow_cmd->add_option("--max-value", flow_max_value, "Closure orbit value budget")
        ->capture_default_str();
    add_output_options(flow_cmd, flow_out);

    // --- verify -------------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "Run the full identity suite");
    OutputOptions verify_out;
    std::string verify_grid = "default";
    verify_cmd->add_option("--grid", verify_grid, "Check grid")
        ->check(CLI::IsMember({"default", "quick"}))
        ->capture_default_str();
    add_output_options(verify_cmd, verify_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // app.exit prints the message (or the help text); fold every parse
        // failure into the invalid-configuration exit code.
        return app.exit(e) == 0 ? kExitOk : kExitBadConfig;
    }

    if (orbit_cmd->parsed()) {
        const auto params = make_params(orbit_params);
        const Int n(orbit_n);
        const Int max_value =
            orbit_max_value.empty() ? pow2(512) : Int(orbit_max_value);
        const OrbitRecord rec = orbit(params, n, orbit_max_steps, max_value);
        emit(orbit_out, render(orbit_out, orbit_table(rec), orbit_json(params, rec)));
        return kExitOk;
    }

    if (parity_cmd->parsed()) {
        const auto params = make_params(parity_params);
        if (parity_k < 1 || parity_k > 24)
            throw CLI::ValidationError("parity", "--k must be in [1, 24]");
        Json j = parity_json(params, parity_k);
        bool ok = true;
        if (check_bijection) {
            const auto res = parity_bijection_check(params, parity_k);
            ok = res.bijective;
            j["bijection"] = Json{{"bijective", res.bijective}};
            if (!res.bijective) {
                j["bijection"]["colliding_a"] = res.colliding_a;
                j["bijection"]["colliding_b"] = res.colliding_b;
                std::cerr << "parity vectors collide: n=" << res.colliding_a
                          << " and n=" << res.colliding_b << "\n";
            }
        }
        emit(parity_out, render(parity_out, parity_table(params, parity_k), j));
        return ok ? kExitOk : kExitInvariantFailure;
    }

    if (coeffs_cmd->parsed()) {
        const auto params = make_params(coeffs_params);
        const CoeffTable table = CoeffTable::build(params, coeffs_k, coeffs_budget);
        if (coeffs_verify) {
            table.coeff_sums();
            if (const auto fail = verify_mod_decomposition(table, 16)) {
                std::cerr << "decomposition failed at n=" << fail->n << ": " << fail->lhs
                          << " != " << fail->rhs << "\n";
                return kExitInvariantFailure;
            }
        }
        emit(coeffs_out, render(coeffs_out, coeff_table_table(table), coeff_table_json(table)));
        return kExitOk;
    }

    if (energy_cmd->parsed()) {
        const auto params = make_params(energy_params);
        Int n0(energy_n), n1(energy_n);
        if (!energy_sweep.empty()) {
            const auto dots = energy_sweep.find("..");
            if (dots == std::string::npos)
                throw CLI::ValidationError("energy", "--sweep expects n0..n1");
            n0 = Int(energy_sweep.substr(0, dots));
            n1 = Int(energy_sweep.substr(dots + 2));
        }
        std::vector<EnergyReportRow> rows;
        for (Int n = n0; n <= n1; ++n)
            rows.push_back(make_energy_row(params, n, energy_k, energy_m));
        emit(energy_out, render(energy_out, energy_table(rows), energy_json(params, rows)));
        return kExitOk;
    }

    if (deriv_cmd->parsed()) {
        const auto params = make_params(deriv_params);
        const auto decomp = DerivativeDecomposition::build(params, deriv_m);
        if (deriv_verify) {
            if (const auto fail = verify_affine_representation(decomp, 256)) {
                std::cerr << "affine representation failed at n=" << fail->n << " k=" << fail->k
                          << ": " << fail->lhs << " != " << fail->rhs << "\n";
                return kExitInvariantFailure;
            }
        }
        emit(deriv_out, render(deriv_out, derivative_table(decomp), derivative_json(decomp)));
        return kExitOk;
    }

    if (flow_cmd->parsed()) {
        const auto params = make_params(flow_params);
        const SpectralState initial = parse_initial_state(params, flow_init);
        std::vector<std::uint64_t> window;
        if (flow_window.empty()) {
            for (const auto& [f, a] : initial.amplitudes) window.push_back(f);
        } else {
            window = parse_window(flow_window);
        }
        const auto closure = FlowClosure::build(params, window, flow_max_steps, flow_max_value);
        const double norm0 = initial.norm();

        std::vector<FlowReportRow> rows;
        for (unsigned step = 0; step <= flow_t_steps; ++step) {
            const double t = flow_t_max * double(step) / double(std::max(flow_t_steps, 1u));
            SpectralState u(params);
            if (flow_scheme == "closed")
                u = solve_closed_form(closure, initial, t);
            else
                u = solve_numerical(closure, initial, t,
                                    flow_scheme == "rk4" ? Scheme::rk4 : Scheme::picard, flow_dt);
            double window_norm_sq = 0.0;
            for (const auto f : window) window_norm_sq += std::norm(u.at(f));
            const double bound = std::exp(std::sqrt(2.0) * t) * norm0;
            for (const auto f : window) {
                FlowReportRow row;
                row.t = t;
                row.frequency = f;
                row.amplitude = u.at(f);
                row.windowed_norm = std::sqrt(window_norm_sq);
                row.growth_bound = bound;
                rows.push_back(row);
            }
        }
        emit(flow_out, render(flow_out, flow_table(rows), flow_json(params, rows)));
        return kExitOk;
    }

    if (verify_cmd->parsed()) {
        const VerifyConfig cfg =
            verify_grid == "quick" ? VerifyConfig::quick() : VerifyConfig::defaults();
        const auto cert = run_verification(cfg, &std::cerr);
        emit(verify_out,
             render(verify_out, certificate_table(cert), certificate_json(cert)));
        if (cert.all_pass()) {
            std::cerr << "all checks passed\n";
            return kExitOk;
        }
        std::cerr << "some checks FAILED\n";
        return kExitInvariantFailure;
    }

    return kExitBadConfig;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const collatzflow::BudgetExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariantFailure;
    }
}
