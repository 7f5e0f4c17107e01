#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nilharmonics/distributions.hpp"
#include "nilharmonics/group.hpp"
#include "nilharmonics/norm.hpp"
#include "nilharmonics/weak_l1.hpp"

namespace nilh {

// Malformed or missing input; the CLI maps it to exit status 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* library_version();

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

struct LoadedGroup {
    GroupSpec spec;
    NormVariant norm = NormVariant::even_power;
};

// {name, n, weights: ["1","1","2"], structure: [{k, alpha, beta, c}], norm?} with k counted from 1,
// or {builtin: "heisenberg" | "abelian" | "random_step2", n?, seed?, norm?}.
LoadedGroup parse_group_spec(const std::string& text);
LoadedGroup load_group_spec(const std::string& path);
std::string group_spec_json(const GroupSpec& spec, NormVariant norm = NormVariant::even_power);

// {mu, terms: [{alpha: [ints], weighted?, density: {kind, params: {center, scale, amplitude, eps}}}]}
DistributionRep parse_distribution(const std::string& text, const HomogeneousNorm& norm);
DistributionRep load_distribution(const std::string& path, const HomogeneousNorm& norm);

// {atoms: [{xi: [coords], w}]}
AtomicMeasure parse_measure(const std::string& text, const GroupSpec& spec);
AtomicMeasure load_measure(const std::string& path, const GroupSpec& spec);

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    void add(std::vector<Cell> row);
};

// 17 significant digits; nan, inf, -inf spelled out
std::string format_number(double x);
std::string to_csv(const Table& t);
std::string to_json(const Table& t);
// RFC-4180 reader; numeric-looking fields become doubles, everything else strings
Table parse_csv(const std::string& text);
// format: csv | json
void emit_table(const Table& t, const std::string& format, const std::string& path);

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

struct RunMetadata {
    std::string version;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string config_hash;
};
RunMetadata make_metadata(const std::string& config_text, std::uint64_t seed, int threads);
std::string metadata_json(const RunMetadata& m);

}  // namespace nilh
