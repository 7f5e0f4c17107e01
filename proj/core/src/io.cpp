#include "nilharmonics/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nilh {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError(what + ": malformed JSON at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what());
    }
}

template <class T>
T field(const json& j, const char* key, const std::string& what) {
    if (!j.contains(key)) throw InputError(what + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(what + ": field '" + key + "' has the wrong type");
    }
}

NormVariant parse_norm_name(const std::string& s) {
    if (s == "even_power" || s == "even-power") return NormVariant::even_power;
    if (s == "koranyi") return NormVariant::koranyi;
    throw InputError("unknown norm '" + s + "'");
}

double number_or_rational(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return Rational::parse(j.get<std::string>()).value();
    throw InputError("expected a number or a rational string");
}

bool looks_numeric(const std::string& s, double& out) {
    if (s.empty()) return false;
    if (s == "nan") {
        out = std::nan("");
        return true;
    }
    if (s == "inf" || s == "-inf") {
        out = s[0] == '-' ? -HUGE_VAL : HUGE_VAL;
        return true;
    }
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && !std::isspace(static_cast<unsigned char>(s[0]));
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return std::get<std::string>(c);
}

}  // namespace

const char* library_version() { return "0.1.0"; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("write failed for '" + path + "'");
}

LoadedGroup parse_group_spec(const std::string& text) {
    const std::string what = "group spec";
    const json j = parse_json(text, what);
    if (!j.is_object()) throw InputError(what + ": expected an object");
    LoadedGroup g;
    if (j.contains("norm")) g.norm = parse_norm_name(field<std::string>(j, "norm", what));
    try {
        if (j.contains("builtin")) {
            const auto b = field<std::string>(j, "builtin", what);
            if (b == "heisenberg") g.spec = GroupSpec::heisenberg();
            else if (b == "abelian") g.spec = GroupSpec::abelian(j.value("n", 1));
            else if (b == "random_step2")
                g.spec = GroupSpec::random_step2(j.value("seed", std::uint64_t{1}), j.value("n1", 3), j.value("n2", 2));
            else throw InputError(what + ": unknown builtin '" + b + "'");
            return g;
        }
        const int n = field<int>(j, "n", what);
        const auto wj = j.at("weights");
        if (!wj.is_array() || static_cast<int>(wj.size()) != n) throw InputError(what + ": weights must have n entries");
        std::vector<Rational> w;
        for (const auto& x : wj) w.push_back(x.is_string() ? Rational::parse(x.get<std::string>()) : Rational(x.get<std::int64_t>()));
        std::vector<StructureTerm> s;
        if (j.contains("structure")) {
            for (const auto& t : j.at("structure")) {
                StructureTerm st;
                st.k = field<int>(t, "k", what) - 1;
                const auto a = field<std::vector<int>>(t, "alpha", what);
                const auto b = field<std::vector<int>>(t, "beta", what);
                if (static_cast<int>(a.size()) != n || static_cast<int>(b.size()) != n)
                    throw InputError(what + ": structure multi-indices must have n entries");
                st.alpha = mono_from(a);
                st.beta = mono_from(b);
                st.c = number_or_rational(t.at("c"));
                s.push_back(st);
            }
        }
        g.spec = GroupSpec(j.value("name", std::string("custom")), std::move(w), std::move(s));
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(what + ": " + e.what());
    }
    return g;
}

LoadedGroup load_group_spec(const std::string& path) {
    try {
        return parse_group_spec(read_file(path));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string group_spec_json(const GroupSpec& spec, NormVariant norm) {
    json j;
    j["name"] = spec.name();
    j["n"] = spec.dim();
    json w = json::array();
    for (const auto& r : spec.weights()) w.push_back(r.str());
    j["weights"] = w;
    json s = json::array();
    for (const auto& t : spec.structure())
        s.push_back({{"k", t.k + 1},
                     {"alpha", mono_to_vector(t.alpha, spec.dim())},
                     {"beta", mono_to_vector(t.beta, spec.dim())},
                     {"c", t.c}});
    j["structure"] = s;
    j["norm"] = norm == NormVariant::koranyi ? "koranyi" : "even_power";
    return j.dump(2);
}

DistributionRep parse_distribution(const std::string& text, const HomogeneousNorm& norm) {
    const std::string what = "distribution";
    const json j = parse_json(text, what);
    if (!j.is_object()) throw InputError(what + ": expected an object");
    try {
        const double mu = number_or_rational(j.at("mu"));
        std::vector<DistributionTerm> terms;
        if (!j.contains("terms") || !j.at("terms").is_array()) throw InputError(what + ": missing 'terms' array");
        for (const auto& t : j.at("terms")) {
            const auto alpha = field<std::vector<int>>(t, "alpha", what);
            const bool weighted = t.value("weighted", false);
            const json d = t.at("density");
            DensityParams p;
            p.kind = field<std::string>(d, "kind", what);
            const json q = d.contains("params") ? d.at("params") : json::object();
            if (q.contains("center")) p.center = q.at("center").get<std::vector<double>>();
            p.scale = q.value("scale", 1.0);
            p.amplitude = q.value("amplitude", 1.0);
            p.eps = q.value("eps", 1.0);
            terms.push_back(make_term(norm, alpha, p, weighted));
        }
        return DistributionRep(norm, mu, std::move(terms));
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(what + ": " + e.what());
    }
}

DistributionRep load_distribution(const std::string& path, const HomogeneousNorm& norm) {
    try {
        return parse_distribution(read_file(path), norm);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

AtomicMeasure parse_measure(const std::string& text, const GroupSpec& spec) {
    const std::string what = "measure";
    const json j = parse_json(text, what);
    if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array())
        throw InputError(what + ": expected {atoms: [...]}");
    AtomicMeasure m;
    for (const auto& a : j.at("atoms")) {
        Atom at;
        at.xi = field<std::vector<double>>(a, "xi", what);
        at.w = field<double>(a, "w", what);
        if (static_cast<int>(at.xi.size()) != spec.dim()) throw InputError(what + ": atom has the wrong dimension");
        if (!(at.w > 0.0)) throw InputError(what + ": atom weights must be positive");
        m.atoms.push_back(std::move(at));
    }
    return m;
}

AtomicMeasure load_measure(const std::string& path, const GroupSpec& spec) {
    try {
        return parse_measure(read_file(path), spec);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("table row does not match the header");
    rows.push_back(std::move(row));
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + csv_field(t.columns[c]);
    out += "\r\n";
    for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + csv_field(cell_text(r[c]));
        out += "\r\n";
    }
    return out;
}

std::string to_json(const Table& t) {
    json arr = json::array();
    for (const auto& r : t.rows) {
        json o = json::object();
        for (std::size_t c = 0; c < r.size(); ++c) {
            const auto& cell = r[c];
            if (const auto* d = std::get_if<double>(&cell)) {
                if (std::isfinite(*d)) o[t.columns[c]] = *d;
                else o[t.columns[c]] = format_number(*d);
            } else if (const auto* i = std::get_if<long long>(&cell)) {
                o[t.columns[c]] = *i;
            } else if (const auto* b = std::get_if<bool>(&cell)) {
                o[t.columns[c]] = *b;
            } else {
                o[t.columns[c]] = std::get<std::string>(cell);
            }
        }
        arr.push_back(o);
    }
    return arr.dump(2) + "\n";
}

Table parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> rec;
    std::string cur;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            rec.push_back(cur);
            cur.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            rec.push_back(cur);
            records.push_back(rec);
            rec.clear();
            cur.clear();
            any = false;
        } else {
            cur += c;
            any = true;
        }
    }
    if (quoted) throw InputError("csv: unterminated quoted field");
    if (any || !cur.empty()) {
        rec.push_back(cur);
        records.push_back(rec);
    }
    Table t;
    if (records.empty()) return t;
    t.columns = records.front();
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.columns.size())
            throw InputError("csv: record " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                             " fields, header has " + std::to_string(t.columns.size()));
        std::vector<Cell> row;
        for (const auto& f : records[r]) {
            double v;
            if (looks_numeric(f, v)) row.emplace_back(v);
            else row.emplace_back(f);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void emit_table(const Table& t, const std::string& format, const std::string& path) {
    if (format == "csv") write_file(path, to_csv(t));
    else if (format == "json") write_file(path, to_json(t));
    else throw InputError("unknown table format '" + format + "'");
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

RunMetadata make_metadata(const std::string& config_text, std::uint64_t seed, int threads) {
    return {library_version(), seed, threads, hex64(fnv1a(config_text))};
}

std::string metadata_json(const RunMetadata& m) {
    json j = {{"version", m.version}, {"seed", m.seed}, {"threads", m.threads}, {"config_hash", m.config_hash}};
    return j.dump();
}

}  // namespace nilh
