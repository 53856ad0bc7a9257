#include "succmax/cubic.hpp"

#include "succmax/arith.hpp"
#include "succmax/discriminants.hpp"
#include "succmax/genus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

extern "C" {
#include <quadmath.h>
}

namespace succmax {

namespace {

using i128 = __int128;

std::int64_t exact_div(i128 num, i128 den, char const * what)
{
    if (num % den != 0)
        throw std::logic_error(std::string("non-integral coefficient ") + what);
    return static_cast<std::int64_t>(num / den);
}

void append_term(std::string & out, std::int64_t c, char const * monomial)
{
    if (c == 0)
        return;
    out += c < 0 ? '-' : '+';
    std::uint64_t const mag = c < 0 ? static_cast<std::uint64_t>(-c) : static_cast<std::uint64_t>(c);
    if (*monomial == '\0') {
        out += std::to_string(mag);
        return;
    }
    if (mag != 1)
        out += std::to_string(mag) + '*';
    out += monomial;
}

} // namespace

std::string CubicField::polynomial() const
{
    std::string out = "x^3";
    append_term(out, coeffs[0], "x^2");
    append_term(out, coeffs[1], "x");
    append_term(out, coeffs[2], "");
    return out;
}

std::vector<CubicField> enumerate_cubic_fields(std::uint64_t f)
{
    if (!is_cyclic_conductor(3, f))
        throw std::invalid_argument("not a cyclic cubic conductor: " + std::to_string(f));
    unsigned const e3 = valuation(f, 3);
    std::vector<CubicField> out;
    for (std::uint64_t b = 1; 27 * b * b <= 4 * f; ++b) {
        if (e3 == 2 && b % 3 == 0)
            continue;
        auto const [root, exact] = isqrt_exact(4 * f - 27 * b * b);
        if (!exact)
            continue;
        CubicField k;
        k.f = f;
        k.b = b;
        k.e3 = e3;
        k.a = static_cast<std::int64_t>(root);
        i128 const F = static_cast<i128>(f);
        if (e3 == 0) {
            if (k.a % 3 == 1)
                k.a = -k.a;
            k.coeffs = {1, exact_div(1 - F, 3, "(1-f)/3"), exact_div(F * (k.a - 3) + 1, 27, "(f(a-3)+1)/27")};
        } else {
            if (k.a % 9 == 3)
                k.a = -k.a;
            k.coeffs = {0, -exact_div(F, 3, "f/3"), -exact_div(F * k.a, 27, "f*a/27")};
        }
        out.push_back(k);
    }
    return out;
}

__int128 cubic_discriminant(std::array<std::int64_t, 3> const & coeffs)
{
    i128 const a = coeffs[0], b = coeffs[1], c = coeffs[2];
    return a * a * b * b - 4 * b * b * b - 4 * a * a * a * c - 27 * c * c + 18 * a * b * c;
}

char const * to_string(Scope s)
{
    return s == Scope::exact_conductor ? "exact_conductor" : "divisors";
}

std::vector<CubicField> family_members(std::uint64_t f, Scope scope)
{
    if (scope == Scope::exact_conductor)
        return enumerate_cubic_fields(f);
    auto const cond = cyclic_conductor(3, f);
    if (!cond)
        throw std::invalid_argument("not a cyclic cubic conductor: " + std::to_string(f));
    std::vector<std::uint64_t> const parts = cond->components();
    std::vector<std::uint64_t> divisors;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << parts.size()); ++mask) {
        std::uint64_t d = 1;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (mask >> i & 1)
                d *= parts[i];
        divisors.push_back(d);
    }
    std::sort(divisors.begin(), divisors.end());
    std::vector<CubicField> out;
    for (std::uint64_t d : divisors) {
        auto fields = enumerate_cubic_fields(d);
        out.insert(out.end(), fields.begin(), fields.end());
    }
    return out;
}

std::uint64_t family_size(std::uint64_t f, Scope scope)
{
    unsigned const n = omega(f);
    if (n == 0)
        return 0;
    return scope == Scope::exact_conductor ? ipow(2, n - 1) : (ipow(3, n) - 1) / 2;
}

CubicFixtures CubicFixtures::load(std::filesystem::path const & path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open fixture table " + path.string());
    CubicFixtures out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (auto comma = rest.find(','); ; comma = rest.find(',')) {
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos)
                break;
            rest.remove_prefix(comma + 1);
        }
        std::int64_t v[5];
        bool ok = fields.size() == 6 && fields[0] == "CUBIC";
        for (int i = 0; ok && i < 5; ++i) {
            auto s = fields[static_cast<std::size_t>(i + 1)];
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v[i]);
            ok = !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
        }
        if (!ok || v[0] <= 0 || v[4] <= 0)
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": malformed fixture line");
        out.add(static_cast<std::uint64_t>(v[0]), {v[1], v[2], v[3]}, static_cast<std::uint64_t>(v[4]));
    }
    return out;
}

void CubicFixtures::add(std::uint64_t f, std::array<std::int64_t, 3> const & coeffs, std::uint64_t H)
{
    auto const key = std::make_tuple(f, coeffs[0], coeffs[1], coeffs[2]);
    auto [it, inserted] = table_.emplace(key, H);
    if (!inserted && it->second != H)
        throw std::invalid_argument("conflicting fixture rows for conductor " + std::to_string(f));
}

std::optional<std::uint64_t> CubicFixtures::find(CubicField const & field) const
{
    auto it = table_.find(std::make_tuple(field.f, field.coeffs[0], field.coeffs[1], field.coeffs[2]));
    if (it == table_.end())
        return std::nullopt;
    return it->second;
}

std::uint64_t CubicClassNumbers::operator()(CubicField const & field) const
{
    if (fixtures_) {
        if (auto H = fixtures_->find(field))
            return *H;
    }
    auto const request = BackendRequest::classno_cubic(field.coeffs[0], field.coeffs[1], field.coeffs[2]);
    if (!backend_)
        throw BackendError(request.key(), "no fixture for " + field.polynomial() + " and no backend");
    try {
        return backend_->query_class_number(request);
    } catch (BackendError const & e) {
        throw BackendError(request.key(), std::string(e.what()) + " (P=" + field.polynomial() + ")");
    }
}

FamilyAggregate aggregate_family(std::uint64_t f, Scope scope, Epsilon eps, CubicMetric metric,
                                 CubicClassNumbers const & class_numbers)
{
    FamilyAggregate agg;
    agg.f = f;
    agg.scope = scope;
    Real log_H = 0, log_h = 0;
    std::vector<MetricValue> values;
    for (CubicField const & field : family_members(f, scope)) {
        FamilyMember m;
        m.field = field;
        m.N = omega(field.f);
        m.H = class_numbers(field);
        m.h = nongenus_part(m.H, genus_number_cyclic(3, m.N));
        m.value = c_eps(metric == CubicMetric::nongenus ? m.h : m.H, field.f * field.f, eps);
        log_H += real_log(static_cast<Real>(m.H));
        log_h += real_log(static_cast<Real>(m.h));
        values.push_back(m.value);
        agg.members.push_back(std::move(m));
    }
    agg.nK = agg.members.size();
    if (agg.nK != family_size(f, scope))
        throw std::logic_error("family of conductor " + std::to_string(f) + " has unexpected size");
    agg.mean_H = real_exp(log_H / static_cast<Real>(agg.nK));
    agg.mean_h = real_exp(log_h / static_cast<Real>(agg.nK));
    agg.mean_C = geometric_mean(values);
    return agg;
}

namespace {

FieldRecord base_record(FamilyAggregate const & family)
{
    FieldRecord r;
    r.family = Family::cubic;
    r.key = family.f;
    r.N = omega(family.f);
    r.nK = family.nK;
    return r;
}

} // namespace

ScanRecord family_scan_record(FamilyAggregate const & family)
{
    FieldRecord r = base_record(family);
    r.H_mean = family.mean_H;
    r.h_mean = family.mean_h;
    if (family.nK == 1) {
        r.H = family.members.front().H;
        r.h = family.members.front().h;
        r.polynomial = family.members.front().field.polynomial();
    } else {
        r.H = r.h = 0;
    }
    return {std::move(r), family.mean_C, 0};
}

std::vector<ScanRecord> per_field_scan_records(FamilyAggregate const & family)
{
    std::vector<ScanRecord> out;
    std::uint32_t index = 0;
    for (auto const & m : family.members) {
        if (m.field.f != family.f)
            continue;
        FieldRecord r = base_record(family);
        r.nK = 1;
        r.H = m.H;
        r.h = m.h;
        r.H_mean = static_cast<Real>(m.H);
        r.h_mean = static_cast<Real>(m.h);
        r.polynomial = m.field.polynomial();
        out.push_back({std::move(r), m.value, index++});
    }
    return out;
}

} // namespace succmax
