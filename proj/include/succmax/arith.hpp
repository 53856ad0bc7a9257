#pragma once

// Integer utilities shared by every other module: factorization, small
// multiplicative functions and the Kronecker symbol. All inputs fit in 64 bits.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace succmax {

struct PrimePower
{
    std::uint64_t prime;
    unsigned exponent;

    bool operator==(PrimePower const &) const = default;
};

/* Complete factorization of n >= 1; factors sorted by increasing prime. */
struct Factorization
{
    std::uint64_t n = 1;
    std::vector<PrimePower> factors;

    std::size_t omega() const { return factors.size(); }
    bool is_squarefree() const;
    /* All positive divisors, unsorted. */
    std::vector<std::uint64_t> divisors() const;
};

Factorization factorize(std::uint64_t n);

unsigned omega(std::uint64_t n);
unsigned valuation(std::uint64_t n, std::uint64_t p);
bool is_squarefree(std::uint64_t n);

/* Deterministic Miller-Rabin, exact for all 64-bit inputs. */
bool is_prime(std::uint64_t n);

/* Kronecker symbol (a/n), defined for all integers. */
int kronecker(std::int64_t a, std::int64_t n);

struct IsqrtResult
{
    std::uint64_t root;
    bool exact;
};
IsqrtResult isqrt_exact(std::uint64_t n);
std::uint64_t isqrt(std::uint64_t n);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);
std::uint64_t ipow(std::uint64_t base, unsigned exp);

/* Primes below 10^6, computed once. */
std::span<std::uint32_t const> small_primes();

/*
 * Smallest-prime-factor table for [0, limit). Used by the hot loops that
 * factor many small integers (reduced form enumeration, sieved windows).
 */
class SpfTable
{
  public:
    explicit SpfTable(std::uint32_t limit);

    std::uint32_t limit() const { return static_cast<std::uint32_t>(spf_.size()); }
    bool covers(std::uint64_t n) const { return n < spf_.size(); }
    std::uint32_t smallest_factor(std::uint32_t n) const { return spf_[n]; }
    /* Factor n < limit() into the caller's buffer (cleared first). */
    void factor(std::uint32_t n, std::vector<PrimePower> & out) const;

  private:
    std::vector<std::uint32_t> spf_;
};

/* Process-wide table up to 2^22, built on first use. */
SpfTable const & shared_spf_table();

} // namespace succmax
