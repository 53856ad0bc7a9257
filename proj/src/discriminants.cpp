#include "succmax/discriminants.hpp"

#include "succmax/arith.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace succmax {

char const * to_string(Signature s)
{
    return s == Signature::imaginary ? "imaginary" : "real";
}

namespace {

/* Shared acceptance test once the odd part d and 2-adic valuation are known. */
bool accepts(bool negative, std::uint64_t d, unsigned e2, bool odd_part_squarefree)
{
    if (e2 == 1 || e2 > 3 || !odd_part_squarefree)
        return false;
    // Residue of the signed odd part mod 4.
    std::uint64_t const r = negative ? (4 - d % 4) % 4 : d % 4;
    if (e2 == 0)
        return r == 1;
    if (e2 == 2)
        return r == 3;
    return true; // e2 == 3: value/4 = +-2d = 2 mod 4
}

} // namespace

bool is_fundamental(std::int64_t value)
{
    if (value == 0 || value == 1)
        return false;
    bool const negative = value < 0;
    std::uint64_t const a = negative ? static_cast<std::uint64_t>(-(value + 1)) + 1
                                     : static_cast<std::uint64_t>(value);
    unsigned const e2 = static_cast<unsigned>(std::countr_zero(a));
    std::uint64_t const d = a >> e2;
    if (e2 == 1 || e2 > 3)
        return false;
    return accepts(negative, d, e2, is_squarefree(d));
}

std::optional<QuadDiscriminant> make_quad_discriminant(std::int64_t value)
{
    if (!is_fundamental(value))
        return std::nullopt;
    QuadDiscriminant q;
    q.value = value;
    q.abs = value < 0 ? static_cast<std::uint64_t>(-value) : static_cast<std::uint64_t>(value);
    q.signature = value < 0 ? Signature::imaginary : Signature::real;
    q.n_ramified = omega(q.abs);
    return q;
}

FundamentalDiscriminants::FundamentalDiscriminants(Signature signature, std::uint64_t lo,
                                                   std::uint64_t hi)
    : signature_(signature), lo_(std::max<std::uint64_t>(lo, 1)), hi_(hi)
{
}

FundamentalDiscriminants::iterator::iterator(Signature s, std::uint64_t from, std::uint64_t hi)
    : signature_(s), next_(from), hi_(hi), done_(false)
{
    advance();
}

void FundamentalDiscriminants::iterator::advance()
{
    while (next_ <= hi_) {
        std::uint64_t const d = next_++;
        std::int64_t const value = signature_ == Signature::imaginary ? -static_cast<std::int64_t>(d)
                                                                      : static_cast<std::int64_t>(d);
        if (auto q = make_quad_discriminant(value)) {
            current_ = *q;
            return;
        }
    }
    done_ = true;
}

FundamentalDiscriminants::iterator & FundamentalDiscriminants::iterator::operator++()
{
    advance();
    return *this;
}

std::vector<QuadDiscriminant> fundamental_discriminants(Signature signature, std::uint64_t lo,
                                                        std::uint64_t hi)
{
    std::vector<QuadDiscriminant> out;
    for (auto const & q : FundamentalDiscriminants(signature, lo, hi))
        out.push_back(q);
    return out;
}

std::vector<QuadDiscriminant> sieve_fundamental_discriminants(Signature signature,
                                                              std::uint64_t lo,
                                                              std::uint64_t hi)
{
    std::vector<QuadDiscriminant> out;
    lo = std::max<std::uint64_t>(lo, 2);
    if (lo > hi)
        return out;

    constexpr std::uint64_t chunk = 1u << 20;
    std::uint64_t const root = isqrt(hi);
    auto const primes = small_primes();
    if (root >= primes.back())
        throw std::invalid_argument("sieve window too large for the small prime table");

    std::vector<std::uint64_t> rest;
    std::vector<std::uint8_t> omega_count;
    std::vector<std::uint8_t> squarefree;

    for (std::uint64_t start = lo; start <= hi; start += chunk) {
        std::uint64_t const stop = std::min(hi, start + chunk - 1);
        std::size_t const width = static_cast<std::size_t>(stop - start + 1);
        rest.resize(width);
        omega_count.assign(width, 0);
        squarefree.assign(width, 1);
        for (std::size_t i = 0; i < width; ++i)
            rest[i] = start + i;

        for (std::uint32_t p : primes) {
            if (p > root)
                break;
            std::uint64_t first = (start + p - 1) / p * p;
            for (std::uint64_t m = first; m <= stop; m += p) {
                std::size_t const i = static_cast<std::size_t>(m - start);
                ++omega_count[i];
                unsigned e = 0;
                do {
                    rest[i] /= p;
                    ++e;
                } while (rest[i] % p == 0);
                if (e > 1 && p != 2)
                    squarefree[i] = 0;
            }
        }

        for (std::size_t i = 0; i < width; ++i) {
            std::uint64_t const n = start + i;
            unsigned const e2 = static_cast<unsigned>(std::countr_zero(n));
            if (!accepts(signature == Signature::imaginary, n >> e2, e2, squarefree[i]))
                continue;
            QuadDiscriminant q;
            q.abs = n;
            q.value = signature == Signature::imaginary ? -static_cast<std::int64_t>(n)
                                                        : static_cast<std::int64_t>(n);
            q.signature = signature;
            q.n_ramified = omega_count[i] + (rest[i] > 1 ? 1u : 0u);
            out.push_back(q);
        }
    }
    return out;
}

std::vector<std::uint64_t> CyclicConductor::components() const
{
    std::vector<std::uint64_t> out;
    if (delta)
        out.push_back(p * p);
    out.insert(out.end(), tame_primes.begin(), tame_primes.end());
    return out;
}

std::optional<CyclicConductor> cyclic_conductor(std::uint64_t p, std::uint64_t f)
{
    if (f < 2 || p < 2)
        return std::nullopt;
    unsigned const ep = valuation(f, p);
    if (ep == 1 || ep > 2)
        return std::nullopt;
    std::uint64_t tame = f;
    for (unsigned i = 0; i < ep; ++i)
        tame /= p;
    Factorization const fac = factorize(tame);
    if (!fac.is_squarefree())
        return std::nullopt;
    CyclicConductor c;
    c.p = p;
    c.f = f;
    c.delta = ep == 2 ? 1 : 0;
    for (auto const & pp : fac.factors) {
        if (pp.prime % p != 1)
            return std::nullopt;
        c.tame_primes.push_back(pp.prime);
    }
    c.n_ramified = c.delta + static_cast<unsigned>(c.tame_primes.size());
    return c;
}

bool is_cyclic_conductor(std::uint64_t p, std::uint64_t f)
{
    return cyclic_conductor(p, f).has_value();
}

std::uint64_t smallest_conductor_with_n_primes(std::uint64_t p, unsigned count)
{
    std::uint64_t product = 1;
    unsigned found = 0;
    for (std::uint64_t q = 3; found < count; q += 2) {
        // For p = 2 every odd prime qualifies.
        if (q % p != 1 || !is_prime(q))
            continue;
        product *= q;
        ++found;
    }
    return product;
}

} // namespace succmax
