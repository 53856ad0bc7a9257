#pragma once

// Cyclic cubic fields: defining polynomials from 4f = a^2 + 27b^2, conductor
// families, and family records for the maxima engine.

#include "succmax/backend.hpp"
#include "succmax/maxima.hpp"
#include "succmax/metric.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace succmax {

struct CubicField
{
    std::uint64_t f = 0;
    std::int64_t a = 0;
    std::uint64_t b = 0;
    unsigned e3 = 0;
    std::array<std::int64_t, 3> coeffs{}; // c2, c1, c0 of x^3 + c2 x^2 + c1 x + c0

    std::string polynomial() const;
    bool operator==(CubicField const &) const = default;
};

/* All fields of conductor exactly f, ascending in b. Throws std::invalid_argument for invalid f. */
std::vector<CubicField> enumerate_cubic_fields(std::uint64_t f);

/* Discriminant of x^3 + c2 x^2 + c1 x + c0. */
__int128 cubic_discriminant(std::array<std::int64_t, 3> const & coeffs);

enum class Scope { exact_conductor, divisors };
char const * to_string(Scope s);

/* exact_conductor: the fields of conductor f; divisors: every field whose conductor divides f. */
std::vector<CubicField> family_members(std::uint64_t f, Scope scope);

/* Expected family size: 2^(N-1) or (3^N - 1)/2 for N = omega(f). */
std::uint64_t family_size(std::uint64_t f, Scope scope);

/* Bundled (polynomial, H) table; lines CUBIC,<f>,<c2>,<c1>,<c0>,<H>, '#' comments. */
class CubicFixtures
{
  public:
    CubicFixtures() = default;
    static CubicFixtures load(std::filesystem::path const & path);

    void add(std::uint64_t f, std::array<std::int64_t, 3> const & coeffs, std::uint64_t H);
    std::optional<std::uint64_t> find(CubicField const & field) const;
    std::size_t size() const { return table_.size(); }

  private:
    std::map<std::tuple<std::uint64_t, std::int64_t, std::int64_t, std::int64_t>, std::uint64_t> table_;
};

/* Class numbers from fixtures first, then the backend. */
class CubicClassNumbers
{
  public:
    CubicClassNumbers(CubicFixtures const * fixtures, Backend * backend)
        : fixtures_(fixtures), backend_(backend)
    {
    }

    /* Throws BackendError naming the polynomial when no source has the value. */
    std::uint64_t operator()(CubicField const & field) const;

  private:
    CubicFixtures const * fixtures_;
    Backend * backend_;
};

enum class CubicMetric { nongenus, full };

struct FamilyMember
{
    CubicField field;
    std::uint64_t H = 1;
    std::uint64_t h = 1;
    unsigned N = 0; // omega of the member's conductor
    MetricValue value;
};

struct FamilyAggregate
{
    std::uint64_t f = 0;
    Scope scope = Scope::exact_conductor;
    std::vector<FamilyMember> members;
    std::uint64_t nK = 0;
    Real mean_H = 1;
    Real mean_h = 1;
    MetricValue mean_C;
};

/*
 * Member values h / f'^eps (nongenus, h = H / 3^(N'-1)) or H / f'^eps (full)
 * and their geometric means. Throws std::domain_error when 3^(N'-1) does not divide H.
 */
FamilyAggregate aggregate_family(std::uint64_t f, Scope scope, Epsilon eps, CubicMetric metric,
                                 CubicClassNumbers const & class_numbers);

ScanRecord family_scan_record(FamilyAggregate const & family);

/* One record per field of conductor f, for per-field maxima. */
std::vector<ScanRecord> per_field_scan_records(FamilyAggregate const & family);

} // namespace succmax
