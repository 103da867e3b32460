#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "helpers.hpp"
#include "qnet/io.hpp"

using namespace qnet;
using namespace qnet::testing;
using nlohmann::json;

namespace {

json benchmarkJson() {
    NetworkFile nf;
    nf.spec = benchmarkSpec();
    nf.S = identityWeighting(1, 2);
    return networkToJson(nf);
}

} // namespace

TEST_CASE("network JSON round trip preserves the spec") {
    const json j = benchmarkJson();
    const NetworkFile nf = parseNetworkJson(j);
    CHECK(nf.spec.nu == 1);
    CHECK(nf.spec.n == 2);
    CHECK((nf.spec.theta - 0.5 * ccrSymplectic(2)).norm() == 0.0);
    CHECK((nf.spec.M.at({0}) - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
    REQUIRE(nf.S.has_value());
    CHECK(nf.S->rows() == 2);
    CHECK(networkToJson(nf) == j); // canonical form is a fixed point
}

TEST_CASE("file parsing round trip") {
    const std::string path = "/tmp/qnet_io_test.json";
    {
        std::ofstream out(path);
        out << benchmarkJson().dump(2);
    }
    const NetworkFile nf = parseNetworkFile(path);
    CHECK(nf.spec.m == 2);
    std::remove(path.c_str());
    CHECK_THROWS_AS(parseNetworkFile(path), ParseError); // gone now
}

TEST_CASE("schema violations are reported with the offending field") {
    json j = benchmarkJson();
    j["version"] = 2;
    CHECK_THROWS_AS(parseNetworkJson(j), ParseError);

    j = benchmarkJson();
    j.erase("theta");
    CHECK_THROWS_WITH_AS(parseNetworkJson(j), "missing field: theta", ParseError);

    j = benchmarkJson();
    j["M"][0]["offset"] = {0, 0};
    CHECK_THROWS_AS(parseNetworkJson(j), ParseError);

    j = benchmarkJson();
    j["M"].push_back(j["M"][0]); // duplicate offset
    CHECK_THROWS_AS(parseNetworkJson(j), ParseError);

    j = benchmarkJson();
    j["R"] = json::array({json{{"offset", {1}},
                               {"block", {{1.0, 0.0}, {0.0, 1.0}}}}});
    CHECK_THROWS_WITH_AS(parseNetworkJson(j), "R symmetry at offset [1]", InvariantViolation);

    j = benchmarkJson();
    j["n"] = 3; // theta is still 2x2, caught at the schema level
    CHECK_THROWS_AS(parseNetworkJson(j), ParseError);
}

TEST_CASE("ragged and non-numeric matrices are rejected") {
    json j = benchmarkJson();
    j["theta"] = json::array({json::array({0.0, 0.5}), json::array({-0.5})});
    CHECK_THROWS_AS(parseNetworkJson(j), ParseError);
    j = benchmarkJson();
    j["theta"][0][0] = "x";
    CHECK_THROWS_AS(parseNetworkJson(j), ParseError);
}

TEST_CASE("formatDouble survives a parse round trip bit-exactly") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 123456.789, 0.0, 1e300}) {
        CHECK(std::stod(formatDouble(x)) == x);
    }
    CHECK(formatDouble(0.5) == "0.5");
}
