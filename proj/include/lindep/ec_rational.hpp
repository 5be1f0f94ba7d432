#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lindep/arith.hpp"
#include "lindep/ec_finite.hpp"

namespace lindep::ecq {

// y^2 = x^3 + a x + b with integer a, b (users pre-transform to this model).
struct CurveQ {
    Int a, b;

    CurveQ() : a(0), b(0) {}
    CurveQ(Int a_, Int b_); // throws InvalidInputError on a singular curve

    Int discriminant() const; // -16 (4 a^3 + 27 b^2), nonzero
};

// Infinity or an affine point with canonical rationals (lowest terms,
// positive denominator; mpq_class keeps them that way).
struct PointQ {
    Rat x, y;
    bool infinity = true;

    static PointQ infinity_point() { return PointQ{}; }
    static PointQ affine(Rat x, Rat y);
    bool operator==(const PointQ& o) const = default;
};

bool on_curve(const CurveQ& e, const PointQ& p);

PointQ negate(const PointQ& p);
PointQ add(const CurveQ& e, const PointQ& p, const PointQ& q);
PointQ scalar_mul(const CurveQ& e, const Int& n, const PointQ& p);
// sum of coeffs[i] * points[i], computed exactly
PointQ linear_combination(const CurveQ& e, std::span<const Int> coeffs,
                          std::span<const PointQ> points);

// Primes p <= bound of good reduction, ascending: p odd and p not dividing
// the discriminant.
std::vector<std::uint64_t> good_primes(const CurveQ& e, std::uint64_t bound);

// Image of P under reduction mod a good prime p: points with p in the
// denominators go to infinity, the rest reduce coordinate-wise.
ecfp::FpPoint reduce_point(const CurveQ& e, const PointQ& p, std::uint64_t prime);
ecfp::CurveFp reduce_curve(const CurveQ& e, std::uint64_t prime);

// Exact order of P if it is torsion (order <= max_order), nullopt otherwise.
// Over Q, Mazur's theorem bounds torsion orders by 12.
std::optional<unsigned> torsion_order(const CurveQ& e, const PointQ& p, unsigned max_order = 12);

struct TorsionGroup {
    std::vector<PointQ> points; // the full torsion subgroup, infinity first
    unsigned order = 1;
};

// Full torsion subgroup of E(Q) by Lutz-Nagell enumeration: integral
// candidates with y = 0 or y^2 | disc, confirmed by an explicit order check.
TorsionGroup torsion_subgroup(const CurveQ& e);

} // namespace lindep::ecq
