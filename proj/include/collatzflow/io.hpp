#pragma once

// Deterministic CSV/JSON serialization: JSON object keys come out sorted
// (nlohmann::json is map-backed), CSV headers are fixed per report, and
// integers beyond the 53-bit safe range are emitted as decimal strings so no
// consumer silently rounds them.

#include "collatzflow/coeff_table.hpp"
#include "collatzflow/collatz_map.hpp"
#include "collatzflow/derivative.hpp"
#include "collatzflow/energy.hpp"
#include "collatzflow/numeric.hpp"
#include "collatzflow/spectral.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace collatzflow {

using Json = nlohmann::json;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& table);

Json int_to_json(const Int& v);
Int int_from_json(const Json& v);

Json params_json(const CollatzParams& params);

// orbit: step,value,parity
Table orbit_table(const OrbitRecord& rec);
Json orbit_json(const CollatzParams& params, const OrbitRecord& rec);

// parity: n,parity_vector
Table parity_table(const CollatzParams& params, unsigned k);
Json parity_json(const CollatzParams& params, unsigned k);

// coeffs: residue,a,b,alpha_exponent
Table coeff_table_table(const CoeffTable& table);
Json coeff_table_json(const CoeffTable& table);

/// Plain mirror of a serialized coefficient table, for round-tripping.
struct CoeffTableData {
    Int alpha;
    Int beta;
    unsigned k = 0;
    std::vector<Int> a;
    std::vector<Int> b;

    bool operator==(const CoeffTableData&) const = default;
    bool matches(const CoeffTable& table) const;
};
CoeffTableData coeff_table_from_json(const Json& j);

// energy: n,k,m,s_k,s_km,energy,pseudo_virial_num,pseudo_virial_den
struct EnergyReportRow {
    Int n;
    unsigned k = 0;
    unsigned m = 0;
    Int s_k;
    Int s_km;
    Int energy;
    Int virial_num;
    Int virial_den;
};
EnergyReportRow make_energy_row(const CollatzParams& params, const Int& n, unsigned k,
                                unsigned m);
Table energy_table(const std::vector<EnergyReportRow>& rows);
Json energy_json(const CollatzParams& params, const std::vector<EnergyReportRow>& rows);

// deriv: residue,n_coeff_num,free_coeff_num,denominator
Table derivative_table(const DerivativeDecomposition& decomp);
Json derivative_json(const DerivativeDecomposition& decomp);

struct DerivativeData {
    Int alpha;
    Int beta;
    unsigned m = 0;
    std::vector<Int> n_coeff_num;
    std::vector<Int> free_coeff_num;

    bool operator==(const DerivativeData&) const = default;
    bool matches(const DerivativeDecomposition& decomp) const;
};
DerivativeData derivative_from_json(const Json& j);

// flow: t,frequency,re,im,windowed_norm,growth_bound
struct FlowReportRow {
    double t = 0.0;
    std::uint64_t frequency = 0;
    Complex amplitude;
    double windowed_norm = 0.0;
    double growth_bound = 0.0;
};
Table flow_table(const std::vector<FlowReportRow>& rows);
Json flow_json(const CollatzParams& params, const std::vector<FlowReportRow>& rows);

/// Initial-data mini-language: "delta:5", "ones:1,2", or
/// "list:3=1.0+0.5i,7=2.0" (comma-separated freq=re[+im i] pairs).
SpectralState parse_initial_state(const CollatzParams& params, const std::string& spec);

}  // namespace collatzflow
