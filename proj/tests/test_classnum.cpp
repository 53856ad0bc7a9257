#include "succmax/classnum.hpp"

#include "oracles/oracles.hpp"

#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

using namespace succmax;

TEST_CASE("small imaginary class numbers")
{
    CHECK(class_number_imaginary(*make_quad_discriminant(-3)) == 1);
    CHECK(class_number_imaginary(*make_quad_discriminant(-4)) == 1);
    CHECK(class_number_imaginary(*make_quad_discriminant(-23)) == 3);
    CHECK(class_number_imaginary(*make_quad_discriminant(-163)) == 1);
    CHECK(class_number_imaginary(*make_quad_discriminant(-1190591)) == 2051);
    CHECK_THROWS_AS(class_number_imaginary(*make_quad_discriminant(5)), std::invalid_argument);
}

TEST_CASE("imaginary class numbers match nested-loop enumeration")
{
    for (auto const & d : fundamental_discriminants(Signature::imaginary, 1, 10000))
        REQUIRE_MESSAGE(class_number_imaginary(d) == oracle::class_number_nested(d.abs), d.value);
}

TEST_CASE("batch table agrees with single computations")
{
    for (auto [lo, hi] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{1, 30000}, {777777, 790000}}) {
        ImaginaryClassNumberTable const t(lo, hi);
        for (auto const & d : fundamental_discriminants(Signature::imaginary, lo, hi))
            REQUIRE_MESSAGE(t(d.abs) == class_number_imaginary(d), d.value);
    }
}

TEST_CASE("Dirichlet oracle")
{
    for (auto const & d : fundamental_discriminants(Signature::imaginary, 1, 3000))
        CHECK(class_number_imaginary_oracle(d) == oracle::class_number_nested(d.abs));
    CHECK_THROWS_AS(class_number_imaginary_oracle(*make_quad_discriminant(-1190591), 1000),
                    std::out_of_range);
}

TEST_CASE("reduced indefinite forms match brute force")
{
    for (auto const & d : fundamental_discriminants(Signature::real, 1, 3000)) {
        auto const forms = reduced_indefinite_forms(d);
        std::set<oracle::Form> got;
        for (auto const & f : forms) {
            CHECK(f.disc() == d.value);
            CHECK(is_reduced_indefinite(f, d.abs));
            got.insert({f.a, f.b, f.c});
        }
        REQUIRE_MESSAGE(got == oracle::reduced_indefinite(d.abs), d.value);
    }
}

TEST_CASE("narrow class numbers match PARI's bnfnarrow")
{
    std::ifstream in(SUCCMAX_TEST_DATA "/real_narrow_pari.txt");
    REQUIRE(in);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream s(line);
        std::int64_t D;
        std::uint64_t H;
        s >> D >> H;
        REQUIRE_MESSAGE(narrow_class_number_real(*make_quad_discriminant(D)) == H, D);
        ++n;
    }
    CHECK(n == 1516);
}

TEST_CASE("rho cycles partition the reduced forms")
{
    for (std::int64_t D : {5, 12, 136, 229, 401, 3129, 90001}) {
        auto const d = *make_quad_discriminant(D);
        auto const cycles = form_cycles(d);
        std::set<QuadraticForm> seen;
        std::size_t total = 0;
        for (auto const & c : cycles) {
            CHECK(c.size() % 2 == 0);
            for (std::size_t i = 0; i < c.size(); ++i) {
                CHECK(rho_step(c[i], d.abs) == c[(i + 1) % c.size()]);
                seen.insert(c[i]);
            }
            total += c.size();
        }
        auto const all = reduced_indefinite_forms(d);
        CHECK(total == all.size());
        CHECK(seen == std::set<QuadraticForm>(all.begin(), all.end()));
        CHECK(cycles.size() == narrow_class_number_real(d));
    }
    CHECK_THROWS_AS(rho_step({1, 1, 1}, 5), std::invalid_argument);
}

TEST_CASE("class number cache")
{
    ClassNumberCache cache(4);
    std::map<std::int64_t, std::uint64_t> expect;
    for (auto const & d : fundamental_discriminants(Signature::imaginary, 1, 200)) {
        CHECK(cache.get(d) == class_number(d));
        CHECK(cache.size() <= 4);
    }
    auto const d = *make_quad_discriminant(-199);
    auto const hits = cache.hits();
    cache.get(d);
    CHECK(cache.hits() == hits + 1);
}
