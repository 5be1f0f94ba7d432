#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lindep/arith.hpp"

namespace lindep::ecfp {

using u64 = std::uint64_t;

// y^2 = x^3 + a x + b over F_p, p an odd prime of good reduction.
struct CurveFp {
    u64 p = 0, a = 0, b = 0;

    CurveFp() = default;
    CurveFp(u64 p_, u64 a_, u64 b_);
};

struct FpPoint {
    u64 x = 0, y = 0;
    bool infinity = true;

    static FpPoint infinity_point() { return FpPoint{}; }
    static FpPoint affine(u64 x, u64 y) { return FpPoint{x, y, false}; }
    bool operator==(const FpPoint& o) const = default;
};

bool on_curve(const CurveFp& e, const FpPoint& p);
FpPoint negate(const CurveFp& e, const FpPoint& p);
FpPoint add(const CurveFp& e, const FpPoint& p, const FpPoint& q);
FpPoint scalar_mul(const CurveFp& e, u64 n, const FpPoint& p);
FpPoint scalar_mul(const CurveFp& e, const Int& n, const FpPoint& p);

// All points of E(F_p), infinity first (only sensible for small p).
std::vector<FpPoint> enumerate_points(const CurveFp& e);

// Baby-step/giant-step tables refuse to grow beyond this many entries;
// primes needing more are skipped by the caller.
inline constexpr std::size_t kBsgsTableCap = std::size_t{1} << 20;

// Thrown (and caught by the per-prime kernel, which then skips the prime)
// when a BSGS table would exceed kBsgsTableCap.
struct BsgsCapExceeded : Error {
    using Error::Error;
};

struct CountOptions {
    u64 brute_threshold = 1000; // x-scan with a quadratic-residue table up to here
    unsigned sample_budget = 40;
};

// #E(F_p). Brute force for p <= brute_threshold; otherwise Mestre-style:
// random point orders inside the Hasse interval via BSGS until a unique
// multiple of their lcm remains. nullopt = AmbiguousOrder within budget.
// The result always satisfies the Hasse bound.
std::optional<u64> count_points(const CurveFp& e, std::mt19937_64& rng,
                                const CountOptions& opts = {});

// Exact order of P given a multiple n of it (n P = infinity) and n's factorization.
u64 point_order(const CurveFp& e, const FpPoint& p, u64 n, const arith::Factorization& f);

// E(F_p) ~ Z/d1 x Z/d2 with d1 | d2 and d1 | p-1.
struct GroupStructure {
    u64 n = 1;           // group order
    u64 d1 = 1, d2 = 1;  // invariant factors, d1 * d2 = n, d1 | d2
    FpPoint g1, g2;      // order(g1) = d1, order(g2) = d2, <g1> + <g2> direct
    arith::Factorization n_factors;
};

struct StructureOptions {
    unsigned sample_budget = 96;
};

// Monte Carlo two-generator decomposition; the returned structure is fully
// certified (orders verified, independence proven via subgroup dlogs).
// nullopt = StructureNotFound within budget.
std::optional<GroupStructure> group_structure(const CurveFp& e, u64 n, std::mt19937_64& rng,
                                              const StructureOptions& opts = {});

// k with k * base = target, base of order m with factorization f.
// nullopt = target not in <base>. Pohlig-Hellman + BSGS.
std::optional<u64> dlog(const CurveFp& e, const FpPoint& base, u64 m,
                        const arith::Factorization& f, const FpPoint& target);

// Unique (i mod d1, j mod d2) with P = i g1 + j g2; per-prime-power
// two-dimensional BSGS recombined by CRT. Throws InternalError when no pair
// exists (bad structure; caller re-seeds or skips).
std::pair<u64, u64> coordinates(const CurveFp& e, const GroupStructure& s, const FpPoint& p);

// Result of testing r_p(P) against the subgroup generated by the reduced gens.
struct LocalMembership {
    u64 prime = 0;
    bool solvable = false;

    // When solvable: coefficient coset c0 + <basis columns>, modulo nothing
    // (a genuine integer lattice; it contains modulus * Z^r).
    std::vector<Int> offset;
    arith::IntMat basis;
    u64 modulus = 1; // = d2 (or p-1 in the multiplicative group)

    // The local system itself, kept for reports and re-verification:
    // row 0 mod d1, row 1 mod d2.
    std::pair<u64, u64> target_coords{0, 0};
    std::vector<std::pair<u64, u64>> gen_coords;
    u64 d1 = 1, d2 = 1;
};

// Write target and gens in (Z/d1 x Z/d2) coordinates and solve the 2 x r
// congruence system. solvable == false iff target is not in the subgroup
// generated by gens inside E(F_p).
LocalMembership local_membership(const CurveFp& e, const GroupStructure& s,
                                 const FpPoint& target, std::span<const FpPoint> gens);

// Exhaustive subgroup closure membership (test/verification oracle; p small).
bool member_by_closure(const CurveFp& e, const FpPoint& target, std::span<const FpPoint> gens);

} // namespace lindep::ecfp
