#pragma once

// Class numbers of quadratic fields from binary quadratic forms.
//
// Imaginary fields: ordinary class number, counted over reduced positive
// definite forms (-a < b <= a <= c, b >= 0 when a == c or b == a).
// Real fields: restricted (narrow) class number, counted as the number of
// rho-cycles of reduced indefinite forms (|sqrt(D) - 2|a|| < b < sqrt(D)).

#include "succmax/discriminants.hpp"

#include <compare>
#include <cstdint>
#include <list>
#include <unordered_map>
#include <vector>

namespace succmax {

struct QuadraticForm
{
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;

    std::int64_t disc() const { return b * b - 4 * a * c; }
    bool is_primitive() const;

    auto operator<=>(QuadraticForm const &) const = default;
};

using FormCycle = std::vector<QuadraticForm>;

/* Throws std::invalid_argument unless d is imaginary. */
std::uint64_t class_number_imaginary(QuadDiscriminant const & d);

/*
 * Dirichlet's class number formula, evaluated by direct summation of the
 * Kronecker character. Independent of the form machinery; O(|D|).
 * Throws std::out_of_range when |D| > bound.
 */
std::uint64_t class_number_imaginary_oracle(QuadDiscriminant const & d,
                                            std::uint64_t bound = 1000000);

/*
 * Batch class numbers for every imaginary fundamental discriminant with
 * lo <= |D| <= hi, by sweeping reduced forms (a, b, c) over the window.
 * Values at non-fundamental |D| are meaningless (imprimitive forms are
 * counted) and must not be read.
 */
class ImaginaryClassNumberTable
{
  public:
    ImaginaryClassNumberTable(std::uint64_t lo, std::uint64_t hi);

    std::uint64_t lo() const { return lo_; }
    std::uint64_t hi() const { return hi_; }
    std::uint64_t operator()(std::uint64_t abs_disc) const;

  private:
    std::uint64_t lo_;
    std::uint64_t hi_;
    std::vector<std::uint32_t> counts_;
};

bool is_reduced_indefinite(QuadraticForm const & f, std::uint64_t disc);

/* All primitive reduced indefinite forms of discriminant d, sorted. */
std::vector<QuadraticForm> reduced_indefinite_forms(QuadDiscriminant const & d);

/* Throws std::invalid_argument if f is not a reduced indefinite form of disc. */
QuadraticForm rho_step(QuadraticForm const & f, std::uint64_t disc);

std::vector<FormCycle> form_cycles(QuadDiscriminant const & d);

std::uint64_t narrow_class_number_real(QuadDiscriminant const & d);

/* Dispatch on signature. */
std::uint64_t class_number(QuadDiscriminant const & d);

/*
 * Bounded memo for class numbers keyed by discriminant. Eviction is
 * least-recently-inserted; results never depend on the capacity.
 */
class ClassNumberCache
{
  public:
    explicit ClassNumberCache(std::size_t capacity = 1u << 16) : capacity_(capacity) {}

    std::uint64_t get(QuadDiscriminant const & d);
    std::size_t size() const { return map_.size(); }
    std::size_t hits() const { return hits_; }

  private:
    std::size_t capacity_;
    std::size_t hits_ = 0;
    std::list<std::int64_t> order_;
    std::unordered_map<std::int64_t, std::uint64_t> map_;
};

} // namespace succmax
