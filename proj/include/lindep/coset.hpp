#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lindep/arith.hpp"
#include "lindep/ec_finite.hpp"

namespace lindep::coset {

// Affine coset t + L of Z^r holding every coefficient vector consistent with
// the local systems absorbed so far. basis is the canonical column HNF of L
// and the offset is reduced into the canonical box, so equality of constraints
// is field-by-field equality.
struct CosetConstraint {
    std::size_t dim = 0;
    std::vector<Int> offset;            // canonical: 0 <= offset[i] < basis(i,i)
    arith::IntMat basis;                // r x r column HNF, full rank
    std::vector<std::uint64_t> source_primes;

    // t = 0, L = Z^r: no constraint yet.
    static CosetConstraint universe(std::size_t r);

    bool operator==(const CosetConstraint& o) const;
    bool contains(std::span<const Int> v) const;
};

// Intersect with the coset of one local system. nullopt = empty intersection
// (a contradiction: for honest inputs this means the declared gens were
// dependent, or a prime produced faulty data).
std::optional<CosetConstraint> absorb(const CosetConstraint& c,
                                      const ecfp::LocalMembership& local);

struct Candidate {
    std::vector<Int> coeffs;
    bool operator==(const Candidate& o) const = default;
};

// The coset representative with each coordinate reduced into the symmetric
// range (-M_i/2, M_i/2] along the HNF diagonal; nullopt when some coordinate
// exceeds `bound` in absolute value (NoSmallCandidate).
std::optional<Candidate> candidate(const CosetConstraint& c, const Int& bound);

// Same, for the coset of the relation a*P = sum c_i P_i (offset scaled by a,
// lattice unchanged).
std::optional<Candidate> scaled_candidate(const CosetConstraint& c, const Int& a,
                                          const Int& bound);

// True iff the last `window` entries exist, hold a candidate, and are equal.
bool is_stable(std::span<const std::optional<Candidate>> history, std::size_t window);

} // namespace lindep::coset
