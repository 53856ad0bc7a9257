#pragma once

// The normalized class-number metric C_eps = h / (sqrt D)^eps with an exact
// rational exponent, its geometric means over families of fields, and a
// comparison that never misorders two values.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace succmax {

/* 113-bit mantissa binary float (libquadmath). */
using Real = __float128;

/* Exponent eps = num/den in lowest terms, 0 <= eps < 2. */
class Epsilon
{
  public:
    constexpr Epsilon() = default;
    /* Throws std::invalid_argument for den == 0 or num/den >= 2. */
    Epsilon(std::uint64_t num, std::uint64_t den);

    /* Accepts "p/q", an integer, or a plain decimal such as "0.05" (exactly 1/20). */
    static Epsilon parse(std::string_view text);

    std::uint64_t num() const { return num_; }
    std::uint64_t den() const { return den_; }
    Real value() const;
    bool is_zero() const { return num_ == 0; }

    /* Terminating decimal when possible ("0.05"), otherwise "p/q". */
    std::string str() const;

    bool operator==(Epsilon const &) const = default;

  private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

/* One field's contribution: (h_num / h_den) / disc_abs^(eps/2). */
struct MetricPart
{
    std::uint64_t h_num = 1;
    std::uint64_t h_den = 1;
    std::uint64_t disc_abs = 1;

    bool operator==(MetricPart const &) const = default;
};

/*
 * Value [prod_i (h_i / D_i^(eps/2))]^(1/root). A single field has root 1 and
 * one part; a geometric mean over n fields has root n. approx carries the
 * value to about 2^-106 relative.
 */
struct MetricValue
{
    Epsilon eps;
    std::uint64_t root = 1;
    std::vector<MetricPart> parts;
    Real approx = 1;

    /* [prod h_i]^(1/root), the numerator side of the value. */
    Real h_mean() const;
};

MetricValue c_eps(std::uint64_t h_num, std::uint64_t h_den, std::uint64_t disc_abs, Epsilon eps);
inline MetricValue c_eps(std::uint64_t h, std::uint64_t disc_abs, Epsilon eps)
{
    return c_eps(h, 1, disc_abs, eps);
}

/* The constant 1 (h = 1, D = 1) at the given eps. */
MetricValue metric_one(Epsilon eps);

/*
 * Sign of a - b. Decided in extended precision when the relative gap exceeds
 * 2^-80, otherwise exactly: by integer powers when they stay small, else by
 * prime exponent vectors with an adaptive-precision sign evaluation.
 * Throws std::invalid_argument when eps differs.
 */
std::strong_ordering compare(MetricValue const & a, MetricValue const & b);

/* Exact tier only; exposed for tests. */
std::strong_ordering compare_exact(MetricValue const & a, MetricValue const & b);

/* Geometric mean of values sharing eps; throws std::invalid_argument otherwise or if empty. */
MetricValue geometric_mean(std::span<MetricValue const> values);

/* Decimal rendering with the given number of significant digits; the integer part is never rounded. */
std::string format_real(Real x, int significant = 19);

double to_double(Real x);
Real real_log(Real x);
Real real_exp(Real x);
Real real_from_string(std::string_view text);

} // namespace succmax
