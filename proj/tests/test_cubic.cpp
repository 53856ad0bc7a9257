#include "succmax/arith.hpp"
#include "succmax/cubic.hpp"
#include "succmax/discriminants.hpp"

#include "oracles/oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace succmax;

namespace {

CubicFixtures const & fixtures()
{
    static CubicFixtures const f = CubicFixtures::load(SUCCMAX_FIXTURES);
    return f;
}

double rel(Real a, char const * b)
{
    return oracle::rel_diff(static_cast<long double>(a), std::stold(b));
}

} // namespace

TEST_CASE("polynomials of the listed conductors")
{
    std::vector<std::pair<std::uint64_t, std::string>> const listed = {
        {7, "x^3+x^2-2*x-1"},
        {163, "x^3+x^2-54*x-169"},
        {313, "x^3+x^2-104*x+371"},
        {1063, "x^3+x^2-354*x+2441"},
        {1489, "x^3+x^2-496*x+4081"},
        {348457, "x^3+x^2-116152*x-15190144"},
        {9, "x^3-3*x+1"},
    };
    for (auto const & [f, poly] : listed) {
        auto const fields = enumerate_cubic_fields(f);
        REQUIRE(fields.size() == 1);
        CHECK(fields[0].polynomial() == poly);
    }
    auto const pair = enumerate_cubic_fields(165889);
    REQUIRE(pair.size() == 2);
    CHECK(pair[0].polynomial() == "x^3+x^2-55296*x+3809303");
    CHECK(pair[1].polynomial() == "x^3+x^2-55296*x-1996812");
    CHECK_THROWS_AS(enumerate_cubic_fields(8), std::invalid_argument);
}

TEST_CASE("discriminants are f^2 times a square")
{
    for (std::uint64_t f = 7; f <= 20000; ++f) {
        if (!is_cyclic_conductor(3, f))
            continue;
        for (auto const & k : enumerate_cubic_fields(f)) {
            oracle::Big const disc = oracle::cubic_discriminant(k.coeffs[0], k.coeffs[1], k.coeffs[2]);
            __int128 const mine = cubic_discriminant(k.coeffs);
            REQUIRE(oracle::Big(static_cast<long long>(mine)) == disc);
            oracle::Big const f2 = oracle::Big(f) * f;
            REQUIRE(disc % f2 == 0);
            oracle::Big const q = disc / f2;
            oracle::Big const r = boost::multiprecision::sqrt(q);
            REQUIRE(r * r == q);
        }
    }
}

TEST_CASE("member counts")
{
    for (std::uint64_t f = 1; f <= 100000; ++f) {
        if (!is_cyclic_conductor(3, f))
            continue;
        unsigned const N = oracle::omega(f);
        REQUIRE(enumerate_cubic_fields(f).size() == (1ull << (N - 1)));
        CHECK(family_size(f, Scope::exact_conductor) == (1ull << (N - 1)));
        CHECK(family_size(f, Scope::divisors) == (ipow(3, N) - 1) / 2);
    }
    auto const members = family_members(63, Scope::divisors);
    REQUIRE(members.size() == 4);
    CHECK(members[0].f == 7);
    CHECK(members[1].f == 9);
    CHECK(members[2].f == 63);
}

TEST_CASE("fixtures")
{
    auto const & fx = fixtures();
    CHECK(fx.size() > 15000);
    CHECK(fx.find(enumerate_cubic_fields(163)[0]) == 4u);
    auto const pair = enumerate_cubic_fields(165889);
    CHECK(fx.find(pair[0]) == 3u);
    CHECK(fx.find(pair[1]) == 2352u);
    // Every field up to the covered bound is present.
    for (std::uint64_t f = 7; f <= 100000; ++f)
        if (is_cyclic_conductor(3, f))
            for (auto const & k : enumerate_cubic_fields(f))
                REQUIRE_MESSAGE(fx.find(k), k.polynomial());

    auto const tmp = std::filesystem::temp_directory_path() / "succmax_conflict.txt";
    {
        std::ofstream out(tmp);
        out << "# conflicting\nCUBIC,7,1,-2,-1,1\nCUBIC,7,1,-2,-1,2\n";
    }
    CHECK_THROWS(CubicFixtures::load(tmp));
    std::filesystem::remove(tmp);
}

TEST_CASE("missing class numbers name the polynomial")
{
    CubicFixtures empty;
    CubicClassNumbers const source(&empty, nullptr);
    try {
        source(enumerate_cubic_fields(163)[0]);
        FAIL("expected BackendError");
    } catch (BackendError const & e) {
        CHECK(std::string(e.what()).find("x^3+x^2-54*x-169") != std::string::npos);
    }
}

TEST_CASE("family aggregates")
{
    CubicClassNumbers const source(&fixtures(), nullptr);
    auto const fam = aggregate_family(63, Scope::divisors, Epsilon(1, 50), CubicMetric::full, source);
    CHECK(fam.nK == 4);
    CHECK(rel(fam.mean_H, "1.7320508075688772936") < 1e-12);
    CHECK(rel(fam.mean_C.approx, "1.627685591700590660") < 1e-12);

    auto const single = aggregate_family(163, Scope::exact_conductor, Epsilon(1, 100), CubicMetric::nongenus, source);
    CHECK(single.nK == 1);
    CHECK(rel(single.mean_C.approx, "3.8013522515881") < 1e-13);
    auto const r = family_scan_record(single);
    CHECK(r.field.H == 4);
    CHECK(r.field.polynomial == "x^3+x^2-54*x-169");

    auto const two = aggregate_family(165889, Scope::exact_conductor, Epsilon(1, 10), CubicMetric::nongenus, source);
    CHECK(two.nK == 2);
    auto const rec = family_scan_record(two);
    CHECK(rec.field.nK == 2);
    CHECK(rel(rec.field.H_mean, "84") < 1e-17);
    auto const per = per_field_scan_records(two);
    REQUIRE(per.size() == 2);
    CHECK(per[0].member == 0);
    CHECK(per[1].member == 1);
    CHECK(per[1].field.h == 784);
    CHECK(rel(per[1].value.approx, "235.6862811297153") < 1e-14);
}
