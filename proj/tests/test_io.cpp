#include <cmath>
#include <limits>

#include "doctest.h"
#include "nilharmonics/io.hpp"

using namespace nilh;

TEST_CASE("shipped heisenberg spec equals the builtin") {
    const LoadedGroup g = load_group_spec(std::string(NILH_DATA_DIR) + "/heisenberg.json");
    CHECK(g.norm == NormVariant::koranyi);
    const GroupSpec H = GroupSpec::heisenberg();
    const GroupElement x{0.3, -1.2, 2.0}, y{1.5, 0.4, -0.7};
    const auto a = g.spec.multiply(x, y), b = H.multiply(x, y);
    for (int k = 0; k < 3; ++k) CHECK(a[static_cast<std::size_t>(k)] == doctest::Approx(b[static_cast<std::size_t>(k)]));
}

TEST_CASE("group spec json round-trips") {
    const GroupSpec G = GroupSpec::random_step2(5, 2, 1);
    const LoadedGroup back = parse_group_spec(group_spec_json(G));
    const GroupElement x{0.3, -1.2, 2.0}, y{1.5, 0.4, -0.7};
    const auto a = G.multiply(x, y), b = back.spec.multiply(x, y);
    for (int k = 0; k < 3; ++k) CHECK(a[static_cast<std::size_t>(k)] == doctest::Approx(b[static_cast<std::size_t>(k)]));
}

TEST_CASE("malformed input raises InputError") {
    CHECK_THROWS_AS(parse_group_spec("{\"n\": 2"), InputError);
    CHECK_THROWS_AS(parse_group_spec("{\"n\": 2, \"weights\": [\"1\"]}"), InputError);
    CHECK_THROWS_AS(parse_group_spec("{\"builtin\": \"sphere\"}"), InputError);
    CHECK_THROWS_AS(load_group_spec("/nonexistent/spec.json"), InputError);
    const GroupSpec H = GroupSpec::heisenberg();
    CHECK_THROWS_AS(parse_measure("{\"atoms\": [{\"xi\": [0, 0], \"w\": 1}]}", H), InputError);
    CHECK_THROWS_AS(parse_measure("{\"atoms\": [{\"xi\": [0, 0, 0], \"w\": -1}]}", H), InputError);
}

TEST_CASE("measure and distribution files load") {
    const GroupSpec H = GroupSpec::heisenberg();
    const AtomicMeasure m = load_measure(std::string(NILH_DATA_DIR) + "/atoms_heisenberg.json", H);
    CHECK(m.atoms.size() == 2);
    const HomogeneousNorm N(H);
    const DistributionRep T = load_distribution(std::string(NILH_DATA_DIR) + "/h_weighted_x2_gaussian.json", N);
    CHECK(T.mu() == doctest::Approx(5.0));
    CHECK(T.terms().size() == 1);
    CHECK(T.terms()[0].weighted);
}

TEST_CASE("csv quoting and round trip") {
    Table t;
    t.columns = {"name", "value", "flag"};
    t.add({std::string("plain"), 1.5, true});
    t.add({std::string("has,comma \"quoted\""), std::numeric_limits<double>::quiet_NaN(), false});
    const std::string csv = to_csv(t);
    CHECK(csv.find("\"has,comma \"\"quoted\"\"\"") != std::string::npos);
    CHECK(csv.find("\r\n") != std::string::npos);
    const Table back = parse_csv(csv);
    REQUIRE(back.rows.size() == 2);
    CHECK(std::get<std::string>(back.rows[1][0]) == "has,comma \"quoted\"");
    CHECK(std::get<double>(back.rows[0][1]) == doctest::Approx(1.5));
}

TEST_CASE("number formatting") {
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(std::stod(format_number(0.1)) == 0.1);
}

TEST_CASE("metadata hashes the configuration") {
    const RunMetadata a = make_metadata("config", 3, 1), b = make_metadata("config", 3, 1),
                      c = make_metadata("other", 3, 1);
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.config_hash != c.config_hash);
    CHECK(a.version == library_version());
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
}
