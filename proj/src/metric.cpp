#include "succmax/metric.hpp"

#include "succmax/arith.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

extern "C" {
#include <quadmath.h>
}

namespace succmax {

namespace mp = boost::multiprecision;

namespace {

using u64 = std::uint64_t;

Real log_u64(u64 x)
{
    return x == 1 ? Real(0) : logq(static_cast<Real>(x));
}

Real log_of_value(MetricValue const & v)
{
    Real const half_eps = v.eps.value() / 2;
    Real sum = 0;
    for (auto const & part : v.parts)
        sum += log_u64(part.h_num) - log_u64(part.h_den) - half_eps * log_u64(part.disc_abs);
    return sum / static_cast<Real>(v.root);
}

void finish(MetricValue & v)
{
    v.approx = expq(log_of_value(v));
}

std::strong_ordering sign_of(int s)
{
    return s < 0 ? std::strong_ordering::less
                 : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

struct Powers
{
    u64 num_exp; // exponent applied to this value's prod h_num / prod h_den
    u64 disc_exp;
};

/* Exponents that clear both roots and the eps denominator. */
std::pair<Powers, Powers> clearing_powers(MetricValue const & a, MetricValue const & b)
{
    u64 const q2 = 2 * a.eps.den();
    u64 const p = a.eps.num();
    return {{q2 * b.root, p * b.root}, {q2 * a.root, p * a.root}};
}

double log2_product(MetricValue const & v, u64 MetricPart::*field)
{
    double bits = 0;
    for (auto const & part : v.parts)
        bits += std::log2(static_cast<double>(part.*field)) + 1;
    return bits;
}

mp::cpp_int product(MetricValue const & v, u64 MetricPart::*field)
{
    mp::cpp_int out = 1;
    for (auto const & part : v.parts)
        out *= part.*field;
    return out;
}

std::optional<std::strong_ordering> compare_by_integers(MetricValue const & a, MetricValue const & b)
{
    auto const [pa, pb] = clearing_powers(a, b);
    double const lhs_bits = pa.num_exp * log2_product(a, &MetricPart::h_num) +
                            pb.num_exp * log2_product(b, &MetricPart::h_den) +
                            pb.disc_exp * log2_product(b, &MetricPart::disc_abs);
    double const rhs_bits = pb.num_exp * log2_product(b, &MetricPart::h_num) +
                            pa.num_exp * log2_product(a, &MetricPart::h_den) +
                            pa.disc_exp * log2_product(a, &MetricPart::disc_abs);
    if (std::max(lhs_bits, rhs_bits) > double(1u << 22))
        return std::nullopt;

    auto power = [](mp::cpp_int const & x, u64 e) { return mp::pow(x, static_cast<unsigned>(e)); };
    mp::cpp_int const lhs = power(product(a, &MetricPart::h_num), pa.num_exp) *
                            power(product(b, &MetricPart::h_den), pb.num_exp) *
                            power(product(b, &MetricPart::disc_abs), pb.disc_exp);
    mp::cpp_int const rhs = power(product(b, &MetricPart::h_num), pb.num_exp) *
                            power(product(a, &MetricPart::h_den), pa.num_exp) *
                            power(product(a, &MetricPart::disc_abs), pa.disc_exp);
    return sign_of(lhs.compare(rhs));
}

using ExponentVector = std::map<u64, mp::cpp_int>;

void accumulate(ExponentVector & ev, u64 n, mp::cpp_int const & weight)
{
    for (auto const & [prime, e] : factorize(n).factors)
        ev[prime] += weight * e;
}

/* log(a^K) - log(b^K) = sum_p e_p log p for the clearing power K. */
ExponentVector log_ratio_exponents(MetricValue const & a, MetricValue const & b)
{
    auto const [pa, pb] = clearing_powers(a, b);
    ExponentVector ev;
    for (auto const & part : a.parts) {
        accumulate(ev, part.h_num, mp::cpp_int(pa.num_exp));
        accumulate(ev, part.h_den, -mp::cpp_int(pa.num_exp));
        accumulate(ev, part.disc_abs, -mp::cpp_int(pa.disc_exp));
    }
    for (auto const & part : b.parts) {
        accumulate(ev, part.h_num, -mp::cpp_int(pb.num_exp));
        accumulate(ev, part.h_den, mp::cpp_int(pb.num_exp));
        accumulate(ev, part.disc_abs, mp::cpp_int(pb.disc_exp));
    }
    std::erase_if(ev, [](auto const & kv) { return kv.second == 0; });
    return ev;
}

template <unsigned Digits>
std::optional<int> sign_at_precision(ExponentVector const & ev)
{
    using F = mp::number<mp::cpp_bin_float<Digits>>;
    F sum = 0;
    F bound = 0;
    for (auto const & [prime, e] : ev) {
        F const term = F(e) * mp::log(F(prime));
        sum += term;
        bound += mp::abs(term);
    }
    bound *= mp::pow(F(10), -static_cast<int>(Digits) + 8);
    if (mp::abs(sum) <= bound)
        return std::nullopt;
    return sum < 0 ? -1 : 1;
}

std::strong_ordering compare_by_exponents(MetricValue const & a, MetricValue const & b)
{
    ExponentVector const ev = log_ratio_exponents(a, b);
    if (ev.empty())
        return std::strong_ordering::equal;
    // Distinct primes have Q-linearly independent logarithms, so a nonzero
    // vector gives a nonzero sum and enough precision always settles it.
    if (auto s = sign_at_precision<60>(ev))
        return sign_of(*s);
    if (auto s = sign_at_precision<400>(ev))
        return sign_of(*s);
    if (auto s = sign_at_precision<3000>(ev))
        return sign_of(*s);
    throw std::runtime_error("metric comparison undecided at 3000 digits");
}

} // namespace

Epsilon::Epsilon(std::uint64_t num, std::uint64_t den)
{
    if (den == 0)
        throw std::invalid_argument("epsilon denominator is zero");
    u64 const g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
    if (num_ >= 2 * den_)
        throw std::invalid_argument("epsilon must lie in [0, 2)");
}

Epsilon Epsilon::parse(std::string_view text)
{
    auto fail = [&]() -> Epsilon {
        throw std::invalid_argument("cannot parse epsilon '" + std::string(text) + "'");
    };
    auto parse_u64 = [&](std::string_view s) {
        u64 v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
            fail();
        return v;
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos)
        return Epsilon(parse_u64(text.substr(0, slash)), parse_u64(text.substr(slash + 1)));

    auto dot = text.find('.');
    if (dot == std::string_view::npos)
        return Epsilon(parse_u64(text), 1);
    std::string_view const whole = text.substr(0, dot);
    std::string_view const frac = text.substr(dot + 1);
    if (frac.size() > 18 || (whole.empty() && frac.empty()))
        fail();
    u64 const scale = ipow(10, static_cast<unsigned>(frac.size()));
    u64 const w = whole.empty() ? 0 : parse_u64(whole);
    u64 const f = frac.empty() ? 0 : parse_u64(frac);
    if (w >= 2)
        fail();
    return Epsilon(w * scale + f, scale);
}

Real Epsilon::value() const
{
    return static_cast<Real>(num_) / static_cast<Real>(den_);
}

std::string Epsilon::str() const
{
    u64 d = den_;
    unsigned twos = 0, fives = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++twos;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++fives;
    }
    if (d != 1)
        return std::to_string(num_) + "/" + std::to_string(den_);
    unsigned const places = std::max(twos, fives);
    u64 const scaled = num_ * (ipow(10, places) / den_);
    std::string digits = std::to_string(scaled);
    if (places == 0)
        return digits;
    if (digits.size() <= places)
        digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
    return digits;
}

Real MetricValue::h_mean() const
{
    Real sum = 0;
    for (auto const & part : parts)
        sum += log_u64(part.h_num) - log_u64(part.h_den);
    return expq(sum / static_cast<Real>(root));
}

MetricValue c_eps(std::uint64_t h_num, std::uint64_t h_den, std::uint64_t disc_abs, Epsilon eps)
{
    if (h_num == 0 || h_den == 0 || disc_abs == 0)
        throw std::invalid_argument("c_eps: h and D must be positive");
    MetricValue v;
    v.eps = eps;
    v.parts.push_back({h_num, h_den, disc_abs});
    finish(v);
    return v;
}

MetricValue metric_one(Epsilon eps)
{
    return c_eps(1, 1, 1, eps);
}

std::strong_ordering compare_exact(MetricValue const & a, MetricValue const & b)
{
    if (a.eps != b.eps)
        throw std::invalid_argument("compare: epsilon mismatch");
    if (a.root == b.root && a.parts == b.parts)
        return std::strong_ordering::equal;
    if (auto r = compare_by_integers(a, b))
        return *r;
    return compare_by_exponents(a, b);
}

std::strong_ordering compare(MetricValue const & a, MetricValue const & b)
{
    if (a.eps != b.eps)
        throw std::invalid_argument("compare: epsilon mismatch");
    Real const gap = a.approx - b.approx;
    Real const scale = std::max(fabsq(a.approx), fabsq(b.approx));
    if (fabsq(gap) > scale * ldexpq(1, -80))
        return gap < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    return compare_exact(a, b);
}

MetricValue geometric_mean(std::span<MetricValue const> values)
{
    if (values.empty())
        throw std::invalid_argument("geometric_mean: no values");
    u64 common_root = 1;
    for (auto const & v : values) {
        if (v.eps != values.front().eps)
            throw std::invalid_argument("geometric_mean: epsilon mismatch");
        common_root = std::lcm(common_root, v.root);
    }
    MetricValue out;
    out.eps = values.front().eps;
    out.root = common_root * values.size();
    for (auto const & v : values) {
        for (u64 k = 0; k < common_root / v.root; ++k)
            out.parts.insert(out.parts.end(), v.parts.begin(), v.parts.end());
    }
    finish(out);
    return out;
}

std::string format_real(Real x, int significant)
{
    char buf[256];
    if (x == 0)
        return "0";
    quadmath_snprintf(buf, sizeof buf, "%.*Qe", significant - 1, x);
    std::string_view sv(buf);
    int exponent = 0;
    auto epos = sv.find('e');
    std::from_chars(sv.data() + epos + 1 + (sv[epos + 1] == '+'), sv.data() + sv.size(), exponent);
    int const decimals = std::max(0, significant - 1 - exponent);
    quadmath_snprintf(buf, sizeof buf, "%.*Qf", decimals, x);
    return buf;
}

double to_double(Real x)
{
    return static_cast<double>(x);
}

Real real_log(Real x)
{
    return logq(x);
}

Real real_exp(Real x)
{
    return expq(x);
}

Real real_from_string(std::string_view text)
{
    std::string s(text);
    return strtoflt128(s.c_str(), nullptr);
}

} // namespace succmax
