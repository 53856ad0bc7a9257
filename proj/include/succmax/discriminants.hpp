#pragma once

// Fundamental quadratic discriminants and conductors of degree-p cyclic fields.

#include <cstdint>
#include <optional>
#include <vector>

namespace succmax {

enum class Signature { imaginary, real };

char const * to_string(Signature s);

struct QuadDiscriminant
{
    std::int64_t value = 0;  // D_K
    std::uint64_t abs = 0;   // |D_K|
    Signature signature = Signature::imaginary;
    unsigned n_ramified = 0; // omega(|D_K|)

    bool operator==(QuadDiscriminant const &) const = default;
};

/*
 * True iff value is the discriminant of a quadratic field: value = 1 mod 4 and
 * squarefree, or value = 4m with m = 2, 3 mod 4 and m squarefree. Both signs.
 */
bool is_fundamental(std::int64_t value);

/* Validated construction; nullopt when value is not fundamental. */
std::optional<QuadDiscriminant> make_quad_discriminant(std::int64_t value);

/*
 * Ascending stream of the fundamental discriminants of one signature with
 * lo <= |D_K| <= hi, produced by filtering consecutive integers.
 */
class FundamentalDiscriminants
{
  public:
    FundamentalDiscriminants(Signature signature, std::uint64_t lo, std::uint64_t hi);

    class iterator
    {
      public:
        using value_type = QuadDiscriminant;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        QuadDiscriminant const & operator*() const { return current_; }
        QuadDiscriminant const * operator->() const { return &current_; }
        iterator & operator++();
        iterator operator++(int)
        {
            auto tmp = *this;
            ++*this;
            return tmp;
        }
        bool operator==(iterator const & o) const { return done_ == o.done_ && (done_ || next_ == o.next_); }

      private:
        friend class FundamentalDiscriminants;
        iterator(Signature s, std::uint64_t from, std::uint64_t hi);
        void advance();

        Signature signature_ = Signature::imaginary;
        std::uint64_t next_ = 0;
        std::uint64_t hi_ = 0;
        bool done_ = true;
        QuadDiscriminant current_{};
    };

    iterator begin() const { return iterator(signature_, lo_, hi_); }
    iterator end() const { return iterator(); }

  private:
    Signature signature_;
    std::uint64_t lo_;
    std::uint64_t hi_;
};

std::vector<QuadDiscriminant> fundamental_discriminants(Signature signature, std::uint64_t lo,
                                                        std::uint64_t hi);

/*
 * Sieve fast path over a window: same output as fundamental_discriminants,
 * computed with a segmented sieve of squarefreeness and omega.
 */
std::vector<QuadDiscriminant> sieve_fundamental_discriminants(Signature signature,
                                                              std::uint64_t lo,
                                                              std::uint64_t hi);

struct CyclicConductor
{
    std::uint64_t p = 3;
    std::uint64_t f = 1;
    unsigned delta = 0;                      // 1 iff p^2 | f
    std::vector<std::uint64_t> tame_primes;  // q_i = 1 mod p, ascending
    unsigned n_ramified = 0;

    /* Prime-power building blocks of f: p^2 (if delta) and each q_i. */
    std::vector<std::uint64_t> components() const;
};

/* f = p^(2 delta) * q_1 ... q_n with distinct q_i = 1 mod p, q_i != p. */
std::optional<CyclicConductor> cyclic_conductor(std::uint64_t p, std::uint64_t f);
bool is_cyclic_conductor(std::uint64_t p, std::uint64_t f);

/* Product of the N smallest primes = 1 mod p (odd primes when p = 2). */
std::uint64_t smallest_conductor_with_n_primes(std::uint64_t p, unsigned count);

} // namespace succmax
