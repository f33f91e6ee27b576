#include "collatzflow/io.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace collatzflow {

std::string to_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << table.header[i] << (i + 1 < table.header.size() ? "," : "\n");
    for (const auto& row : table.rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
    return out.str();
}

Json int_to_json(const Int& v) {
    if (fits_json_number(v)) return Json(v.convert_to<std::int64_t>());
    return Json(v.str());
}

Int int_from_json(const Json& v) {
    if (v.is_number_integer()) return Int(v.get<std::int64_t>());
    if (v.is_string()) return Int(v.get<std::string>());
    throw std::invalid_argument("expected an integer or a decimal string");
}

Json params_json(const CollatzParams& params) {
    return Json{{"alpha", int_to_json(params.alpha)}, {"beta", int_to_json(params.beta)}};
}

namespace {

std::string parity_of(const Int& v) {
    return boost::multiprecision::bit_test(boost::multiprecision::abs(v), 0) ? "1" : "0";
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

Table orbit_table(const OrbitRecord& rec) {
    Table t{{"step", "value", "parity"}, {}};
    for (std::size_t i = 0; i < rec.values.size(); ++i)
        t.rows.push_back({std::to_string(i), rec.values[i].str(), parity_of(rec.values[i])});
    return t;
}

Json orbit_json(const CollatzParams& params, const OrbitRecord& rec) {
    Json values = Json::array();
    for (const auto& v : rec.values) values.push_back(int_to_json(v));
    Json j{{"params", params_json(params)},
           {"start", int_to_json(rec.start)},
           {"values", values},
           {"terminated_by", to_string(rec.terminated_by)}};
    if (rec.cycle_entry_index) j["cycle_entry_index"] = *rec.cycle_entry_index;
    if (rec.cycle_length) j["cycle_length"] = *rec.cycle_length;
    return j;
}

Table parity_table(const CollatzParams& params, unsigned k) {
    Table t{{"n", "parity_vector"}, {}};
    const std::uint64_t count = std::uint64_t(1) << k;
    for (std::uint64_t n = 1; n <= count; ++n)
        t.rows.push_back({std::to_string(n), parity_vector(params, Int(n), k).to_string()});
    return t;
}

Json parity_json(const CollatzParams& params, unsigned k) {
    Json vectors = Json::array();
    const std::uint64_t count = std::uint64_t(1) << k;
    for (std::uint64_t n = 1; n <= count; ++n)
        vectors.push_back(Json{{"n", n}, {"bits", parity_vector(params, Int(n), k).to_string()}});
    return Json{{"params", params_json(params)}, {"k", k}, {"vectors", vectors}};
}

Table coeff_table_table(const CoeffTable& table) {
    Table t{{"residue", "a", "b", "alpha_exponent"}, {}};
    for (std::uint64_t i = 0; i < table.size(); ++i)
        t.rows.push_back({std::to_string(i), table.a(i).str(), table.b(i).str(),
                          std::to_string(table.alpha_exponent(i))});
    return t;
}

Json coeff_table_json(const CoeffTable& table) {
    Json a = Json::array(), b = Json::array(), e = Json::array();
    for (std::uint64_t i = 0; i < table.size(); ++i) {
        a.push_back(int_to_json(table.a(i)));
        b.push_back(int_to_json(table.b(i)));
        e.push_back(table.alpha_exponent(i));
    }
    return Json{{"params", params_json(table.params())},
                {"k", table.k()},
                {"a", a},
                {"b", b},
                {"alpha_exponent", e}};
}

CoeffTableData coeff_table_from_json(const Json& j) {
    CoeffTableData data;
    data.alpha = int_from_json(j.at("params").at("alpha"));
    data.beta = int_from_json(j.at("params").at("beta"));
    data.k = j.at("k").get<unsigned>();
    for (const auto& v : j.at("a")) data.a.push_back(int_from_json(v));
    for (const auto& v : j.at("b")) data.b.push_back(int_from_json(v));
    return data;
}

bool CoeffTableData::matches(const CoeffTable& table) const {
    return alpha == table.params().alpha && beta == table.params().beta && k == table.k() &&
           a == table.a_all() && b == table.b_all();
}

EnergyReportRow make_energy_row(const CollatzParams& params, const Int& n, unsigned k,
                                unsigned m) {
    const EnergySums sums = partial_sums(params, n, k, m);
    EnergyReportRow row;
    row.n = n;
    row.k = k;
    row.m = m;
    row.s_k = sums.s_k;
    row.s_km = sums.s_km;
    row.energy = energy_sum(params, n, k);
    const Rat virial = pseudo_virial(params, n, k);
    row.virial_num = boost::multiprecision::numerator(virial);
    row.virial_den = boost::multiprecision::denominator(virial);
    return row;
}

Table energy_table(const std::vector<EnergyReportRow>& rows) {
    Table t{{"n", "k", "m", "s_k", "s_km", "energy", "pseudo_virial_num", "pseudo_virial_den"},
            {}};
    for (const auto& r : rows)
        t.rows.push_back({r.n.str(), std::to_string(r.k), std::to_string(r.m), r.s_k.str(),
                          r.s_km.str(), r.energy.str(), r.virial_num.str(), r.virial_den.str()});
    return t;
}

Json energy_json(const CollatzParams& params, const std::vector<EnergyReportRow>& rows) {
    Json out = Json::array();
    for (const auto& r : rows)
        out.push_back(Json{{"n", int_to_json(r.n)},
                           {"k", r.k},
                           {"m", r.m},
                           {"s_k", int_to_json(r.s_k)},
                           {"s_km", int_to_json(r.s_km)},
                           {"energy", int_to_json(r.energy)},
                           {"pseudo_virial_num", int_to_json(r.virial_num)},
                           {"pseudo_virial_den", int_to_json(r.virial_den)}});
    return Json{{"params", params_json(params)}, {"rows", out}};
}

Table derivative_table(const DerivativeDecomposition& decomp) {
    Table t{{"residue", "n_coeff_num", "free_coeff_num", "denominator"}, {}};
    const std::string den = decomp.denominator().str();
    for (const auto& cls : decomp.per_class())
        t.rows.push_back({std::to_string(cls.residue), cls.n_coeff_numerator.str(),
                          cls.free_coeff_numerator.str(), den});
    return t;
}

Json derivative_json(const DerivativeDecomposition& decomp) {
    Json n_num = Json::array(), free_num = Json::array();
    for (const auto& cls : decomp.per_class()) {
        n_num.push_back(int_to_json(cls.n_coeff_numerator));
        free_num.push_back(int_to_json(cls.free_coeff_numerator));
    }
    return Json{{"params", params_json(decomp.params())},
                {"m", decomp.m()},
                {"denominator", int_to_json(decomp.denominator())},
                {"n_coeff_num", n_num},
                {"free_coeff_num", free_num},
                {"n_coeff_sum", int_to_json(decomp.n_coeff_sum())},
                {"free_coeff_sum", int_to_json(decomp.free_coeff_sum())}};
}

DerivativeData derivative_from_json(const Json& j) {
    DerivativeData data;
    data.alpha = int_from_json(j.at("params").at("alpha"));
    data.beta = int_from_json(j.at("params").at("beta"));
    data.m = j.at("m").get<unsigned>();
    for (const auto& v : j.at("n_coeff_num")) data.n_coeff_num.push_back(int_from_json(v));
    for (const auto& v : j.at("free_coeff_num")) data.free_coeff_num.push_back(int_from_json(v));
    return data;
}

bool DerivativeData::matches(const DerivativeDecomposition& decomp) const {
    if (alpha != decomp.params().alpha || beta != decomp.params().beta || m != decomp.m())
        return false;
    if (n_coeff_num.size() != decomp.per_class().size() ||
        free_coeff_num.size() != decomp.per_class().size())
        return false;
    for (std::size_t i = 0; i < n_coeff_num.size(); ++i)
        if (n_coeff_num[i] != decomp.per_class()[i].n_coeff_numerator ||
            free_coeff_num[i] != decomp.per_class()[i].free_coeff_numerator)
            return false;
    return true;
}

Table flow_table(const std::vector<FlowReportRow>& rows) {
    Table t{{"t", "frequency", "re", "im", "windowed_norm", "growth_bound"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({format_double(r.t), std::to_string(r.frequency),
                          format_double(r.amplitude.real()), format_double(r.amplitude.imag()),
                          format_double(r.windowed_norm), format_double(r.growth_bound)});
    return t;
}

Json flow_json(const CollatzParams& params, const std::vector<FlowReportRow>& rows) {
    Json out = Json::array();
    for (const auto& r : rows)
        out.push_back(Json{{"t", r.t},
                           {"frequency", r.frequency},
                           {"re", r.amplitude.real()},
                           {"im", r.amplitude.imag()},
                           {"windowed_norm", r.windowed_norm},
                           {"growth_bound", r.growth_bound}});
    return Json{{"params", params_json(params)}, {"rows", out}};
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t begin = 0;
    while (begin <= s.size()) {
        const std::size_t end = s.find(sep, begin);
        if (end == std::string::npos) {
            parts.push_back(s.substr(begin));
            break;
        }
        parts.push_back(s.substr(begin, end - begin));
        begin = end + 1;
    }
    return parts;
}

std::uint64_t parse_frequency(const std::string& s) {
    std::uint64_t f = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), f);
    if (ec != std::errc{} || ptr != s.data() + s.size() || f < 1)
        throw std::invalid_argument("initial state: bad frequency '" + s + "'");
    return f;
}

/// "re", "re+imi" or "re-imi" (the imaginary part ends in 'i').
Complex parse_complex(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("initial state: empty amplitude");
    if (s.back() != 'i') return {std::stod(s), 0.0};
    // Find the sign that separates real and imaginary parts, skipping
    // exponent signs and a leading sign.
    std::size_t sep = std::string::npos;
    for (std::size_t i = s.size() - 1; i >= 1; --i) {
        const char c = s[i];
        if ((c == '+' || c == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            sep = i;
            break;
        }
    }
    if (sep == std::string::npos)  // pure imaginary, e.g. "0.5i"
        return {0.0, std::stod(s.substr(0, s.size() - 1))};
    const double re = std::stod(s.substr(0, sep));
    std::string im_part = s.substr(sep, s.size() - sep - 1);  // keeps the sign, drops 'i'
    if (im_part == "+" || im_part == "-") im_part += "1";
    return {re, std::stod(im_part)};
}

}  // namespace

SpectralState parse_initial_state(const CollatzParams& params, const std::string& spec) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("initial state: expected delta:..., ones:... or list:...");
    const std::string kind = spec.substr(0, colon);
    const std::string body = spec.substr(colon + 1);

    SpectralState state(params);
    if (kind == "delta") {
        state.set(parse_frequency(body), {1.0, 0.0});
    } else if (kind == "ones") {
        for (const auto& part : split(body, ','))
            state.set(parse_frequency(part), {1.0, 0.0});
    } else if (kind == "list") {
        for (const auto& part : split(body, ',')) {
            const std::size_t eq = part.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("initial state: expected freq=value in '" + part + "'");
            state.set(parse_frequency(part.substr(0, eq)), parse_complex(part.substr(eq + 1)));
        }
    } else {
        throw std::invalid_argument("initial state: unknown kind '" + kind + "'");
    }
    return state;
}

}  // namespace collatzflow
