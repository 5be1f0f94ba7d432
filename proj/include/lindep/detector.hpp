#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lindep/arith.hpp"
#include "lindep/coset.hpp"
#include "lindep/ec_finite.hpp"
#include "lindep/ec_rational.hpp"

namespace lindep::detect {

struct DetectorConfig {
    std::uint64_t prime_bound = 100'000;
    unsigned stability_window = 5;
    Int coeff_bound = Int(1) << 20;
    unsigned saturation_bound = 64;
    std::uint64_t seed = 1;
    double max_skipped_fraction = 0.1;
    int worker_count = 1;

    void validate() const; // throws InvalidInputError
};

enum class VerdictKind { dependent, independent, saturation_needed, inconclusive };

enum class InconclusiveReason { budget_exhausted, no_stable_candidate, too_many_skipped_primes };

enum class IndependenceProof { witness_prime, torsion_point };

const char* to_string(VerdictKind k);
const char* to_string(InconclusiveReason r);
const char* to_string(IndependenceProof p);

struct Verdict {
    VerdictKind kind = VerdictKind::inconclusive;

    // dependent / saturation_needed: the exactly verified relation
    //   (saturation_multiplier) * P = sum coeffs[i] * P_i
    std::vector<Int> coeffs;
    Int saturation_multiplier = 1; // >= 2 only for saturation_needed

    // independent
    IndependenceProof proof = IndependenceProof::witness_prime;
    std::uint64_t witness_prime = 0;                   // 0 on the torsion path
    std::optional<ecfp::LocalMembership> witness_local;

    // inconclusive
    InconclusiveReason reason = InconclusiveReason::budget_exhausted;
};

struct StabilityEntry {
    std::uint64_t prime = 0;
    std::optional<std::vector<Int>> candidate;
};

struct SkippedPrime {
    std::uint64_t prime = 0;
    std::string reason;
};

struct RunReport {
    std::string mode;           // "ec-detect" or "mul-detect"
    std::uint64_t seed = 0;
    std::uint64_t prime_bound = 0;
    std::uint64_t primes_processed = 0; // folded into the verdict
    std::vector<SkippedPrime> skipped;
    std::vector<StabilityEntry> stability_trace;
    std::vector<std::string> notes;      // alarms and diagnostics, in order
    unsigned saturation_alarms = 0;      // nonzero is a soundness alarm
};

struct Detection {
    Verdict verdict;
    RunReport report;
};

// Structured evidence for one prime (the `local-report` subcommand and the
// witness re-verification both use it).
struct LocalReport {
    std::uint64_t prime = 0;
    std::string status; // "ok", "bad_prime", "skipped"
    std::string detail; // reason when not ok
    std::uint64_t n = 0, d1 = 0, d2 = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> point_coords;
    std::optional<ecfp::LocalMembership> membership; // target = points[0] vs the rest
};

// ------------------------------------------------------------- elliptic curve

// Decide whether P lies in the subgroup generated by gens (declared
// independent nontorsion points) by accumulating local membership systems
// over good primes. Dependent and SaturationNeeded verdicts are verified by
// exact arithmetic; Independent carries an unconditional local certificate.
Detection detect_ec(const ecq::CurveQ& e, const ecq::PointQ& p,
                    std::span<const ecq::PointQ> gens, const DetectorConfig& cfg);

LocalReport local_report(const ecq::CurveQ& e, std::span<const ecq::PointQ> points,
                         std::uint64_t prime, std::uint64_t seed = 1);

// ------------------------------------------------------------- witness search

struct WitnessQuery {
    std::vector<unsigned> set_i; // 1-based indices: l-part of the order must be trivial
    std::vector<unsigned> set_j; // 1-based indices: order divisible by l^m
    std::uint64_t l = 2;         // a prime
    unsigned m = 1;              // >= 1
    std::uint64_t prime_bound = 100'000;

    void validate(std::size_t r) const; // disjoint, covering, l prime, m >= 1
};

struct WitnessMatch {
    std::uint64_t prime = 0;
    std::vector<std::uint64_t> l_part_orders; // per point, the l-part of ord(r_p(P_i))
};

struct WitnessSearchResult {
    std::vector<WitnessMatch> matches;
    std::uint64_t scanned = 0; // good primes processed
    std::uint64_t skipped = 0; // good primes skipped (counting failures)
    std::uint64_t matched = 0;
};

// Scan good primes <= query.prime_bound for primes where the reductions of
// points[i], i in I, have trivial l-part and those with i in J have order
// divisible by l^M. An empty result is a legal outcome.
WitnessSearchResult find_witness_primes(const ecq::CurveQ& e,
                                        std::span<const ecq::PointQ> points,
                                        const WitnessQuery& query,
                                        std::uint64_t seed = 1, int worker_count = 1);

// ------------------------------------------------------------- Q^x

// Same pipeline inside the cyclic groups F_p^x: dlogs modulo p-1, exact
// verification through prime factorizations and the sign.
Detection detect_mul(const Rat& x, std::span<const Rat> gens, const DetectorConfig& cfg);

} // namespace lindep::detect
