#include "succmax/arith.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace succmax {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr std::uint32_t trial_limit = 1000000;

u64 mulmod(u64 a, u64 b, u64 m)
{
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m)
{
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1)
            result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

bool miller_rabin_witness(u64 n, u64 a, u64 d, unsigned s)
{
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1)
        return false;
    for (unsigned r = 1; r < s; ++r) {
        x = mulmod(x, x, n);
        if (x == n - 1)
            return false;
    }
    return true;
}

/* Brent's variant of Pollard rho, seeded deterministically by the caller. */
u64 rho_split(u64 n, u64 seed)
{
    if (n % 2 == 0)
        return 2;
    u64 const c = seed % (n - 1) + 1;
    auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
    u64 y = seed % n, x = y, ys = y, q = 1, g = 1;
    u64 r = 1;
    constexpr u64 batch = 128;
    do {
        x = y;
        for (u64 i = 0; i < r; ++i)
            y = f(y);
        u64 k = 0;
        do {
            ys = y;
            for (u64 i = 0; i < std::min(batch, r - k); ++i) {
                y = f(y);
                q = mulmod(q, x > y ? x - y : y - x, n);
            }
            g = std::gcd(q, n);
            k += batch;
        } while (k < r && g == 1);
        r *= 2;
    } while (g == 1);
    if (g == n) {
        do {
            ys = f(ys);
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

void factor_large(u64 n, std::vector<u64> & primes)
{
    if (n == 1)
        return;
    if (is_prime(n)) {
        primes.push_back(n);
        return;
    }
    u64 d = n;
    for (u64 seed = 2; d == n; ++seed)
        d = rho_split(n, seed);
    factor_large(d, primes);
    factor_large(n / d, primes);
}

} // namespace

std::span<std::uint32_t const> small_primes()
{
    static std::vector<std::uint32_t> const primes = [] {
        std::vector<bool> composite(trial_limit, false);
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 2; i < trial_limit; ++i) {
            if (composite[i])
                continue;
            out.push_back(i);
            for (u64 j = static_cast<u64>(i) * i; j < trial_limit; j += i)
                composite[j] = true;
        }
        return out;
    }();
    return primes;
}

bool is_prime(u64 n)
{
    if (n < 2)
        return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0)
            return n == p;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These 12 bases are a proven deterministic set below 3.3 * 10^24.
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (miller_rabin_witness(n, a, d, s))
            return false;
    }
    return true;
}

Factorization factorize(u64 n)
{
    Factorization result;
    result.n = n;
    if (n <= 1)
        return result;

    u64 rest = n;
    for (std::uint32_t p : small_primes()) {
        if (static_cast<u64>(p) * p > rest)
            break;
        if (rest % p)
            continue;
        unsigned e = 0;
        do {
            rest /= p;
            ++e;
        } while (rest % p == 0);
        result.factors.push_back({p, e});
    }
    if (rest == 1)
        return result;

    // Whatever survives trial division has no factor below 10^6 (or is prime).
    std::vector<u64> primes;
    factor_large(rest, primes);
    std::sort(primes.begin(), primes.end());
    for (u64 p : primes) {
        if (!result.factors.empty() && result.factors.back().prime == p)
            ++result.factors.back().exponent;
        else
            result.factors.push_back({p, 1});
    }
    return result;
}

bool Factorization::is_squarefree() const
{
    return std::all_of(factors.begin(), factors.end(),
                       [](PrimePower const & pp) { return pp.exponent == 1; });
}

std::vector<u64> Factorization::divisors() const
{
    std::vector<u64> out{1};
    for (auto const & [p, e] : factors) {
        std::size_t const base = out.size();
        u64 pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i)
                out.push_back(out[i] * pk);
        }
    }
    return out;
}

unsigned omega(u64 n)
{
    return static_cast<unsigned>(factorize(n).omega());
}

unsigned valuation(u64 n, u64 p)
{
    unsigned k = 0;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++k;
    }
    return k;
}

bool is_squarefree(u64 n)
{
    return factorize(n).is_squarefree();
}

int kronecker(std::int64_t a, std::int64_t n)
{
    if (n == 0)
        return (a == 1 || a == -1) ? 1 : 0;

    int result = 1;
    u64 m;
    if (n < 0) {
        m = static_cast<u64>(-(n + 1)) + 1;
        if (a < 0)
            result = -result;
    } else {
        m = static_cast<u64>(n);
    }

    // Factor out powers of two from the modulus: (a/2) depends on a mod 8.
    unsigned const twos = static_cast<unsigned>(std::countr_zero(m));
    if (twos) {
        if (a % 2 == 0)
            return 0;
        m >>= twos;
        int const a8 = static_cast<int>(((a % 8) + 8) % 8);
        if ((twos & 1) && (a8 == 3 || a8 == 5))
            result = -result;
    }

    // Jacobi symbol (a/m), m odd positive.
    std::int64_t const mm = static_cast<std::int64_t>(m);
    u64 x = static_cast<u64>(((a % mm) + mm) % mm);
    u64 y = m;
    while (x != 0) {
        unsigned const tz = static_cast<unsigned>(std::countr_zero(x));
        x >>= tz;
        if ((tz & 1) && (y % 8 == 3 || y % 8 == 5))
            result = -result;
        if (x % 4 == 3 && y % 4 == 3)
            result = -result;
        std::swap(x, y);
        x %= y;
    }
    return y == 1 ? result : 0;
}

u64 isqrt(u64 n)
{
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (static_cast<u128>(r) * r > n)
        --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

IsqrtResult isqrt_exact(u64 n)
{
    u64 const r = isqrt(n);
    return {r, r * r == n};
}

u64 gcd(u64 a, u64 b)
{
    return std::gcd(a, b);
}

u64 ipow(u64 base, unsigned exp)
{
    u64 r = 1;
    while (exp--)
        r *= base;
    return r;
}

SpfTable::SpfTable(std::uint32_t limit) : spf_(limit, 0)
{
    for (std::uint32_t i = 2; i < limit; ++i) {
        if (spf_[i])
            continue;
        spf_[i] = i;
        for (u64 j = static_cast<u64>(i) * i; j < limit; j += i) {
            if (!spf_[j])
                spf_[j] = i;
        }
    }
}

void SpfTable::factor(std::uint32_t n, std::vector<PrimePower> & out) const
{
    out.clear();
    while (n > 1) {
        std::uint32_t const p = spf_[n];
        unsigned e = 0;
        do {
            n /= p;
            ++e;
        } while (n % p == 0);
        out.push_back({p, e});
    }
}

SpfTable const & shared_spf_table()
{
    static SpfTable const table(1u << 22);
    return table;
}

} // namespace succmax
