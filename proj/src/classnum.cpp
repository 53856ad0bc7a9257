#include "succmax/classnum.hpp"

#include "succmax/arith.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace succmax {

namespace {

using u64 = std::uint64_t;
using i64 = std::int64_t;

u64 iabs(i64 x)
{
    return x < 0 ? static_cast<u64>(-x) : static_cast<u64>(x);
}

void require_signature(QuadDiscriminant const & d, Signature s, char const * what)
{
    if (d.signature != s || !is_fundamental(d.value))
        throw std::invalid_argument(std::string(what) + ": unsupported discriminant " +
                                    std::to_string(d.value));
}

void divisors_of(u64 m, std::vector<u64> & out, std::vector<PrimePower> & scratch)
{
    SpfTable const & spf = shared_spf_table();
    if (spf.covers(m)) {
        spf.factor(static_cast<std::uint32_t>(m), scratch);
    } else {
        scratch = factorize(m).factors;
    }
    out.assign(1, 1);
    for (auto const & [p, e] : scratch) {
        std::size_t const base = out.size();
        u64 pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i)
                out.push_back(out[i] * pk);
        }
    }
}

} // namespace

bool QuadraticForm::is_primitive() const
{
    return std::gcd(std::gcd(iabs(a), iabs(b)), iabs(c)) == 1;
}

std::uint64_t class_number_imaginary(QuadDiscriminant const & d)
{
    require_signature(d, Signature::imaginary, "class_number_imaginary");
    u64 const D = d.abs;
    u64 const b_max = isqrt(D / 3);
    u64 count = 0;
    for (u64 b = D & 1; b <= b_max; b += 2) {
        u64 const m = (b * b + D) / 4; // a * c
        u64 const a_max = isqrt(m);
        for (u64 a = std::max<u64>(b, 1); a <= a_max; ++a) {
            if (m % a)
                continue;
            u64 const c = m / a;
            // (a, b, c) always counts; (a, -b, c) is a distinct reduced form
            // unless b == 0, b == a or a == c.
            count += (b == 0 || b == a || a == c) ? 1 : 2;
        }
    }
    return count;
}

std::uint64_t class_number_imaginary_oracle(QuadDiscriminant const & d, std::uint64_t bound)
{
    require_signature(d, Signature::imaginary, "class_number_imaginary_oracle");
    if (d.abs > bound)
        throw std::out_of_range("oracle bound exceeded for " + std::to_string(d.value));
    i64 sum = 0;
    for (u64 a = 1; a < d.abs; ++a)
        sum += kronecker(d.value, static_cast<i64>(a)) * static_cast<i64>(a);
    u64 const w = d.value == -3 ? 6 : d.value == -4 ? 4 : 2;
    u64 const num = w * iabs(sum);
    if (num % (2 * d.abs))
        throw std::logic_error("Dirichlet sum not divisible for " + std::to_string(d.value));
    return num / (2 * d.abs);
}

ImaginaryClassNumberTable::ImaginaryClassNumberTable(std::uint64_t lo, std::uint64_t hi)
    : lo_(std::max<u64>(lo, 3)), hi_(hi)
{
    if (lo_ > hi_)
        return;
    counts_.assign(static_cast<std::size_t>(hi_ - lo_ + 1), 0);
    u64 const a_max = isqrt(hi_ / 3);
    for (u64 a = 1; a <= a_max; ++a) {
        u64 const four_a = 4 * a;
        for (i64 b = -static_cast<i64>(a) + 1; b <= static_cast<i64>(a); ++b) {
            u64 const b2 = static_cast<u64>(b * b);
            // D = 4ac - b^2, so c ranges over [ceil((lo+b^2)/4a), floor((hi+b^2)/4a)].
            u64 c = std::max<u64>(b < 0 ? a + 1 : a, (lo_ + b2 + four_a - 1) / four_a);
            u64 const c_max = (hi_ + b2) / four_a;
            if (c > c_max)
                continue;
            u64 idx = four_a * c - b2 - lo_;
            u64 const last = four_a * c_max - b2 - lo_;
            for (; idx <= last; idx += four_a)
                ++counts_[static_cast<std::size_t>(idx)];
        }
    }
}

std::uint64_t ImaginaryClassNumberTable::operator()(std::uint64_t abs_disc) const
{
    if (abs_disc < lo_ || abs_disc > hi_)
        throw std::out_of_range("discriminant outside class number table window");
    return counts_[static_cast<std::size_t>(abs_disc - lo_)];
}

bool is_reduced_indefinite(QuadraticForm const & f, std::uint64_t disc)
{
    if (f.b <= 0 || f.disc() != static_cast<i64>(disc))
        return false;
    u64 const b = static_cast<u64>(f.b);
    u64 const two_a = 2 * iabs(f.a);
    if (b * b >= disc)
        return false;
    if ((two_a + b) * (two_a + b) <= disc)
        return false;
    return two_a <= b || (two_a - b) * (two_a - b) < disc;
}

std::vector<QuadraticForm> reduced_indefinite_forms(QuadDiscriminant const & d)
{
    require_signature(d, Signature::real, "reduced_indefinite_forms");
    u64 const D = d.abs;
    std::vector<QuadraticForm> forms;
    std::vector<u64> divisors;
    std::vector<PrimePower> scratch;
    for (u64 b = (D & 1) ? 1 : 2; b * b < D; b += 2) {
        u64 const m = (D - b * b) / 4; // |a| * |c|
        divisors_of(m, divisors, scratch);
        for (u64 A : divisors) {
            QuadraticForm pos{static_cast<i64>(A), static_cast<i64>(b), -static_cast<i64>(m / A)};
            if (!is_reduced_indefinite(pos, D) || !pos.is_primitive())
                continue;
            forms.push_back(pos);
            forms.push_back({-pos.a, pos.b, -pos.c});
        }
    }
    std::sort(forms.begin(), forms.end());
    return forms;
}

QuadraticForm rho_step(QuadraticForm const & f, std::uint64_t disc)
{
    if (!is_reduced_indefinite(f, disc))
        throw std::invalid_argument("rho_step: form is not reduced");
    i64 const s = static_cast<i64>(isqrt(disc));
    i64 const two_c = 2 * static_cast<i64>(iabs(f.c));
    // Unique b' = -b mod 2|c| with sqrt(D) - 2|c| < b' < sqrt(D).
    i64 const bp = s - ((s + f.b) % two_c + two_c) % two_c;
    i64 const cp = (bp * bp - static_cast<i64>(disc)) / (4 * f.c);
    return {f.c, bp, cp};
}

namespace {

template <typename OnCycle>
std::uint64_t walk_cycles(std::vector<QuadraticForm> const & forms, u64 disc, OnCycle && on_cycle)
{
    std::vector<bool> seen(forms.size(), false);
    std::uint64_t cycles = 0;
    FormCycle cycle;
    for (std::size_t start = 0; start < forms.size(); ++start) {
        if (seen[start])
            continue;
        ++cycles;
        cycle.clear();
        std::size_t i = start;
        do {
            seen[i] = true;
            cycle.push_back(forms[i]);
            QuadraticForm const next = rho_step(forms[i], disc);
            auto it = std::lower_bound(forms.begin(), forms.end(), next);
            if (it == forms.end() || *it != next)
                throw std::logic_error("rho_step left the reduced set");
            i = static_cast<std::size_t>(it - forms.begin());
        } while (i != start);
        on_cycle(cycle);
    }
    return cycles;
}

} // namespace

std::vector<FormCycle> form_cycles(QuadDiscriminant const & d)
{
    std::vector<FormCycle> out;
    walk_cycles(reduced_indefinite_forms(d), d.abs, [&](FormCycle const & c) { out.push_back(c); });
    return out;
}

std::uint64_t narrow_class_number_real(QuadDiscriminant const & d)
{
    return walk_cycles(reduced_indefinite_forms(d), d.abs, [](FormCycle const &) {});
}

std::uint64_t class_number(QuadDiscriminant const & d)
{
    return d.signature == Signature::imaginary ? class_number_imaginary(d)
                                               : narrow_class_number_real(d);
}

std::uint64_t ClassNumberCache::get(QuadDiscriminant const & d)
{
    if (auto it = map_.find(d.value); it != map_.end()) {
        ++hits_;
        return it->second;
    }
    std::uint64_t const h = class_number(d);
    if (capacity_ == 0)
        return h;
    if (map_.size() >= capacity_) {
        map_.erase(order_.front());
        order_.pop_front();
    }
    order_.push_back(d.value);
    map_.emplace(d.value, h);
    return h;
}

} // namespace succmax
