#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "lindep/errors.hpp"

namespace lindep {

using Int = mpz_class;
using Rat = mpq_class;

namespace arith {

// ---------------------------------------------------------------- rng

// splitmix64; used to derive independent per-prime seeds from one run seed.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt, std::uint64_t stream = 0);

// ---------------------------------------------------------------- u64 modular helpers

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t m);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m); // gcd(a,m)=1 or throws
int legendre(std::uint64_t a, std::uint64_t p);          // 0, 1 or -1
// Square root mod an odd prime (Tonelli-Shanks); nullopt for non-residues.
std::optional<std::uint64_t> sqrt_mod(std::uint64_t a, std::uint64_t p);

// Primes up to and including `bound`, ascending.
std::vector<std::uint64_t> primes_up_to(std::uint64_t bound);

// ---------------------------------------------------------------- primality / factoring

// Deterministic Miller-Rabin for n < 2^64 (fixed 12-base set), 64 random
// bases above that (error < 2^-128). `seed` only matters for huge n.
bool is_prime(const Int& n, std::uint64_t seed = 0x11d'5eedULL);
bool is_prime_u64(std::uint64_t n);

struct Factorization {
    Int value;                                        // the factored integer, >= 1
    std::vector<std::pair<Int, unsigned>> factors;    // (prime, exponent), primes ascending

    // Largest e with prime^e dividing value for the given prime (0 if absent).
    unsigned exponent_of(const Int& prime) const;
};

struct FactorOptions {
    std::uint64_t trial_bound = 10'000;   // trial-divide by primes up to this
    std::uint64_t rho_iteration_cap = 10'000'000;
    unsigned rho_attempts = 8;
    std::uint64_t seed = 0xfac7;
};

// Complete factorization of n >= 1. Throws BudgetError if Pollard rho fails
// rho_attempts times on some cofactor.
Factorization factor(const Int& n, const FactorOptions& opts = {});
Factorization factor_u64(std::uint64_t n, const FactorOptions& opts = {});

// ---------------------------------------------------------------- CRT

struct Congruence {
    Int r;
    Int m; // modulus > 0
};

// Simultaneous solution r mod lcm(m_i); nullopt when the congruences conflict.
std::optional<Congruence> crt(std::span<const Congruence> parts);

// ---------------------------------------------------------------- integer matrices

// Dense arbitrary-precision integer matrix. Sizes here are tiny (r <= ~10),
// so no attempt is made at anything clever.
class IntMat {
public:
    IntMat() = default;
    IntMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static IntMat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const IntMat& o) const = default;

    void swap_rows(std::size_t i, std::size_t j);
    void swap_cols(std::size_t i, std::size_t j);
    // row i += c * row j, col i += c * col j
    void add_row(std::size_t i, std::size_t j, const Int& c);
    void add_col(std::size_t i, std::size_t j, const Int& c);
    void negate_row(std::size_t i);
    void negate_col(std::size_t i);

    IntMat transposed() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

IntMat mat_mul(const IntMat& a, const IntMat& b);
std::vector<Int> mat_vec(const IntMat& a, std::span<const Int> v);
// Exact integer determinant (fraction-free Gaussian elimination).
Int det(const IntMat& m);

// ---------------------------------------------------------------- SNF / HNF

struct SnfDecomposition {
    IntMat u;        // rows x rows, unimodular
    IntMat v;        // cols x cols, unimodular
    IntMat d;        // rows x cols, diagonal, d_1 | d_2 | ..., entries >= 0
    IntMat original; // the input matrix

    std::size_t rank() const; // number of nonzero diagonal entries
};

// u * m * v = d with the divisibility chain on the diagonal.
SnfDecomposition smith_normal_form(const IntMat& m);

// Canonical column-style Hermite normal form of the lattice spanned by the
// columns of `gens` (full row rank required): lower-triangular r x r, positive
// diagonal, and 0 <= h[i][j] < h[i][i] for j < i.
IntMat hermite_normal_form(const IntMat& gens);

// ---------------------------------------------------------------- linear systems over Z

struct DiophantineSolution {
    std::vector<Int> particular; // one solution of A x = b
    IntMat kernel;               // columns span {x : A x = 0}
};

// Solve A x = b over the integers; nullopt when no solution exists.
std::optional<DiophantineSolution> solve_diophantine(const IntMat& a, std::span<const Int> b);

struct AffineSolutionSet {
    std::vector<Int> offset; // particular solution c0 in Z^r
    IntMat lattice;          // r x r HNF basis of {c : A c = 0 mod m}
};

// Solve A c = b (mod m) rowwise, modulus m[i] for row i. The solution lattice
// always contains lcm(m) Z^r, hence has full rank. nullopt = unsolvable.
std::optional<AffineSolutionSet> solve_congruence_system(const IntMat& a,
                                                         std::span<const Int> b,
                                                         std::span<const Int> m);

} // namespace arith
} // namespace lindep
