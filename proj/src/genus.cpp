#include "succmax/genus.hpp"

#include "succmax/arith.hpp"

#include <stdexcept>
#include <string>

namespace succmax {

bool GroupSpec::is_cyclic_prime() const
{
    return invariant_factors.size() == 1 && is_prime(invariant_factors.front());
}

GroupSpec group_spec(std::span<std::uint64_t const> invariant_factors)
{
    GroupSpec g;
    for (std::uint64_t n : invariant_factors) {
        if (n < 2)
            throw std::invalid_argument("group_spec: invariant factors must be >= 2");
        g.invariant_factors.push_back(n);
        g.order *= n;
    }
    g.r = static_cast<unsigned>(g.invariant_factors.size());
    for (auto const & pp : factorize(g.order).factors)
        g.R += pp.exponent;
    return g;
}

std::uint64_t genus_number_cyclic(std::uint64_t p, unsigned n_ramified)
{
    if (n_ramified == 0)
        throw std::invalid_argument("genus_number_cyclic: N must be >= 1");
    return ipow(p, n_ramified - 1);
}

std::uint64_t genus_number_abelian(std::span<std::uint64_t const> ramification_indices,
                                   std::uint64_t degree)
{
    std::uint64_t prod = 1;
    for (std::uint64_t e : ramification_indices)
        prod *= e;
    if (degree == 0 || prod % degree)
        throw std::domain_error("genus_number_abelian: degree does not divide prod e_l");
    return prod / degree;
}

std::uint64_t nongenus_part(std::uint64_t class_number, std::uint64_t genus_number)
{
    if (genus_number == 0 || class_number % genus_number)
        throw std::domain_error("genus number " + std::to_string(genus_number) +
                                " does not divide class number " + std::to_string(class_number));
    return class_number / genus_number;
}

GenusDatum genus_datum_cyclic(std::uint64_t p, std::uint64_t class_number, unsigned n_ramified)
{
    GenusDatum d;
    d.H = class_number;
    d.N = n_ramified;
    d.g = genus_number_cyclic(p, n_ramified);
    d.h = nongenus_part(class_number, d.g);
    return d;
}

} // namespace succmax
