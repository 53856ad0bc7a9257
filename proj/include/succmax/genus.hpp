#pragma once

// Genus numbers and non-genus parts of class numbers.

#include <cstdint>
#include <span>
#include <vector>

namespace succmax {

/* Finite abelian group described by its invariant factors. */
struct GroupSpec
{
    std::vector<std::uint64_t> invariant_factors;
    std::uint64_t order = 1;
    unsigned r = 0; // minimal number of generators
    unsigned R = 0; // sum of the prime exponents of the order

    bool is_cyclic_prime() const;
};

/* Each factor must be >= 2; throws std::invalid_argument otherwise. */
GroupSpec group_spec(std::span<std::uint64_t const> invariant_factors);

/* p^(N-1): genus number of a degree-p cyclic field with N ramified primes. */
std::uint64_t genus_number_cyclic(std::uint64_t p, unsigned n_ramified);

/*
 * Genus number of an abelian field from its ramification indices:
 * (prod e_l) / [K:Q]. Throws if the division is not exact.
 */
std::uint64_t genus_number_abelian(std::span<std::uint64_t const> ramification_indices,
                                   std::uint64_t degree);

/* H / g; throws std::domain_error if g does not divide H. */
std::uint64_t nongenus_part(std::uint64_t class_number, std::uint64_t genus_number);

struct GenusDatum
{
    std::uint64_t H = 1;
    std::uint64_t g = 1;
    std::uint64_t h = 1;
    unsigned N = 0;
};

GenusDatum genus_datum_cyclic(std::uint64_t p, std::uint64_t class_number, unsigned n_ramified);

} // namespace succmax
