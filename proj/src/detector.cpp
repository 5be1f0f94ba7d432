#include "lindep/detector.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <unordered_map>

#include "lindep/scan.hpp"

namespace lindep::detect {

const char* to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::dependent: return "dependent";
        case VerdictKind::independent: return "independent";
        case VerdictKind::saturation_needed: return "saturation_needed";
        case VerdictKind::inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(InconclusiveReason r) {
    switch (r) {
        case InconclusiveReason::budget_exhausted: return "budget_exhausted";
        case InconclusiveReason::no_stable_candidate: return "no_stable_candidate";
        case InconclusiveReason::too_many_skipped_primes: return "too_many_skipped_primes";
    }
    return "?";
}

const char* to_string(IndependenceProof p) {
    switch (p) {
        case IndependenceProof::witness_prime: return "witness_prime";
        case IndependenceProof::torsion_point: return "torsion_point";
    }
    return "?";
}

void DetectorConfig::validate() const {
    if (prime_bound < 3) throw InvalidInputError("config: prime_bound must be >= 3");
    if (prime_bound >= (std::uint64_t{1} << 32))
        throw InvalidInputError("config: prime_bound must be below 2^32");
    if (stability_window == 0) throw InvalidInputError("config: stability_window must be >= 1");
    if (coeff_bound <= 0) throw InvalidInputError("config: coeff_bound must be positive");
    if (saturation_bound < 2) throw InvalidInputError("config: saturation_bound must be >= 2");
    if (max_skipped_fraction < 0 || max_skipped_fraction > 1)
        throw InvalidInputError("config: max_skipped_fraction must lie in [0,1]");
    if (worker_count < 1) throw InvalidInputError("config: worker count must be >= 1");
}

void WitnessQuery::validate(std::size_t r) const {
    std::set<unsigned> seen;
    for (unsigned i : set_i) seen.insert(i);
    for (unsigned j : set_j) {
        if (seen.count(j)) throw InvalidInputError("witness query: I and J must be disjoint");
        seen.insert(j);
    }
    if (seen.size() != r) throw InvalidInputError("witness query: I and J must cover all indices");
    for (unsigned k : seen)
        if (k < 1 || k > r) throw InvalidInputError("witness query: index out of range");
    if (m < 1) throw InvalidInputError("witness query: M must be >= 1");
    if (!arith::is_prime(Int(static_cast<unsigned long>(l))))
        throw InvalidInputError("witness query: l must be prime");
    if (prime_bound < 3) throw InvalidInputError("witness query: prime_bound must be >= 3");
}

// ================================================================ scan loop

namespace {

constexpr std::uint64_t kReverifyStream = 0x9d;
const Int kVerifyCoeffCap(4096); // exact verification ceiling; see README

struct PrimeOutcome {
    std::uint64_t p = 0;
    bool ok = false;
    std::string skip_reason;
    ecfp::LocalMembership lm;
};

struct ScanCallbacks {
    // per-prime local computation, seeded from (cfg.seed, p)
    std::function<PrimeOutcome(std::uint64_t)> kernel;
    // fresh-seed recomputation used before emitting an Independent verdict
    std::function<PrimeOutcome(std::uint64_t)> reverify;
    // exhaustive local check for small witness primes: true = target really
    // is outside the local subgroup
    std::function<bool(std::uint64_t)> closure_confirms_witness;
    // exact global verification of mult * P = sum coeffs[i] * P_i
    std::function<bool(std::span<const Int>, const Int&, std::vector<std::string>&)> verify_exact;
};

Detection run_scan(const std::vector<std::uint64_t>& primes, std::size_t r, const char* mode,
                   const DetectorConfig& cfg, const ScanCallbacks& cb) {
    Detection out;
    RunReport& rep = out.report;
    rep.mode = mode;
    rep.seed = cfg.seed;
    rep.prime_bound = cfg.prime_bound;

    coset::CosetConstraint constraint = coset::CosetConstraint::universe(r);
    std::vector<std::optional<coset::Candidate>> history;
    std::vector<std::vector<Int>> rejected;
    bool had_stable = false;
    bool contradicted = false;
    std::optional<Verdict> verdict;

    for (std::size_t base = 0; base < primes.size() && !verdict; base += scan::kBatchSize) {
        const std::size_t count = std::min(scan::kBatchSize, primes.size() - base);
        auto outcomes = scan::map_items<PrimeOutcome>(
            count, cfg.worker_count, [&](std::size_t i) { return cb.kernel(primes[base + i]); });

        for (std::size_t i = 0; i < count && !verdict; ++i) {
            PrimeOutcome& w = outcomes[i];
            if (!w.ok) {
                rep.skipped.push_back({w.p, w.skip_reason});
                continue;
            }
            if (!w.lm.solvable) {
                // a witness prime: recompute from scratch before certifying
                PrimeOutcome check = cb.reverify(w.p);
                if (!check.ok || check.lm.solvable)
                    throw InternalError("witness prime " + std::to_string(w.p) +
                                        " failed fresh-seed re-verification");
                if (w.p <= 50 && !cb.closure_confirms_witness(w.p))
                    throw InternalError("witness prime " + std::to_string(w.p) +
                                        " contradicted by exhaustive closure");
                ++rep.primes_processed;
                Verdict v;
                v.kind = VerdictKind::independent;
                v.proof = IndependenceProof::witness_prime;
                v.witness_prime = w.p;
                v.witness_local = w.lm;
                verdict = std::move(v);
                break;
            }

            if (contradicted) {
                // constraint set already empty; only a locally unsolvable
                // prime can still settle the question
                ++rep.primes_processed;
                continue;
            }

            auto next = coset::absorb(constraint, w.lm);
            if (!next) {
                // The joint system has no integer solution even though each
                // prime was locally solvable. A genuine relation would satisfy
                // every local system, so none exists; keep scanning for a
                // single-prime certificate. With dependent declared generators
                // this warning is the characteristic symptom.
                contradicted = true;
                std::string prior = "{";
                for (std::size_t k = 0; k < constraint.source_primes.size(); ++k)
                    prior += (k ? "," : "") + std::to_string(constraint.source_primes[k]);
                prior += "}";
                rep.notes.push_back("warning: local constraints from prime " +
                                    std::to_string(w.p) + " contradict those from primes " +
                                    prior +
                                    "; no coefficient vector fits all processed primes "
                                    "(re-run the named primes with local-report to inspect); "
                                    "continuing to scan for a witness prime");
                ++rep.primes_processed;
                continue;
            }
            constraint = std::move(*next);
            ++rep.primes_processed;

            auto cand = coset::candidate(constraint, cfg.coeff_bound);
            history.push_back(cand);
            rep.stability_trace.push_back(
                {w.p, cand ? std::optional<std::vector<Int>>(cand->coeffs) : std::nullopt});

            if (!coset::is_stable(history, cfg.stability_window)) continue;
            if (std::find(rejected.begin(), rejected.end(), cand->coeffs) != rejected.end())
                continue;
            had_stable = true;

            if (cb.verify_exact(cand->coeffs, Int(1), rep.notes)) {
                Verdict v;
                v.kind = VerdictKind::dependent;
                v.coeffs = cand->coeffs;
                verdict = std::move(v);
                break;
            }
            rep.notes.push_back("stable candidate at prime " + std::to_string(w.p) +
                                " rejected by verification");

            // Saturation fallback: look for the least a >= 2 with a*P in the
            // lattice. Expected to never fire here; loudly flagged if it does.
            for (unsigned a = 2; a <= cfg.saturation_bound && !verdict; ++a) {
                auto scaled = coset::scaled_candidate(constraint, Int(a), cfg.coeff_bound);
                if (!scaled) continue;
                if (cb.verify_exact(scaled->coeffs, Int(a), rep.notes)) {
                    Verdict v;
                    v.kind = VerdictKind::saturation_needed;
                    v.coeffs = scaled->coeffs;
                    v.saturation_multiplier = a;
                    verdict = std::move(v);
                    ++rep.saturation_alarms;
                    rep.notes.push_back(
                        "SOUNDNESS ALARM: saturation fallback fired with a=" + std::to_string(a) +
                        "; the strengthened local-global equivalence predicts a=1");
                }
            }
            if (!verdict) rejected.push_back(cand->coeffs);
        }
    }

    if (!verdict) {
        Verdict v;
        v.kind = VerdictKind::inconclusive;
        const double skipped = static_cast<double>(rep.skipped.size());
        if (rep.primes_processed == 0 && rep.skipped.empty()) {
            v.reason = InconclusiveReason::budget_exhausted;
            rep.notes.push_back("no good primes below the prime bound");
        } else if (skipped > cfg.max_skipped_fraction * static_cast<double>(rep.primes_processed)) {
            v.reason = InconclusiveReason::too_many_skipped_primes;
        } else if (contradicted) {
            v.reason = InconclusiveReason::budget_exhausted;
            rep.notes.push_back(
                "constraints were contradictory but no single witness prime appeared below "
                "the bound; the declared generators are likely dependent");
        } else if (!had_stable) {
            v.reason = InconclusiveReason::no_stable_candidate;
        } else {
            v.reason = InconclusiveReason::budget_exhausted;
            rep.notes.push_back(
                "stable candidates existed but none verified exactly; "
                "inputs may violate the declared independence hypotheses");
        }
        verdict = std::move(v);
    }
    out.verdict = std::move(*verdict);
    return out;
}

} // namespace

// ================================================================ elliptic case

namespace {

// one prime of the elliptic scan; stream salts the rng for retries
PrimeOutcome ec_prime_kernel(const ecq::CurveQ& e, const ecq::PointQ& target,
                             std::span<const ecq::PointQ> gens, std::uint64_t p,
                             std::uint64_t seed, std::uint64_t stream) {
    PrimeOutcome out;
    out.p = p;
    for (std::uint64_t attempt = 0; attempt < 3; ++attempt) {
        std::mt19937_64 rng(arith::derive_seed(seed, p, stream + attempt));
        try {
            ecfp::CurveFp efp = ecq::reduce_curve(e, p);
            auto n = ecfp::count_points(efp, rng);
            if (!n) {
                out.skip_reason = "ambiguous_order";
                return out;
            }
            auto s = ecfp::group_structure(efp, *n, rng);
            if (!s) {
                out.skip_reason = "structure_not_found";
                return out;
            }
            std::vector<ecfp::FpPoint> rgens;
            rgens.reserve(gens.size());
            for (const auto& g : gens) rgens.push_back(ecq::reduce_point(e, g, p));
            ecfp::FpPoint rt = ecq::reduce_point(e, target, p);
            out.lm = ecfp::local_membership(efp, *s, rt, rgens);
            out.ok = true;
            return out;
        } catch (const ecfp::BsgsCapExceeded&) {
            out.skip_reason = "bsgs_table_cap";
            return out;
        } catch (const InternalError&) {
            // bad structure draw; re-process the prime with a new seed
            out.skip_reason = "inconsistent_structure";
        } catch (const std::exception& ex) {
            // exceptions must not escape the parallel scan region
            out.skip_reason = std::string("error: ") + ex.what();
            return out;
        }
    }
    return out;
}

bool ec_closure_confirms(const ecq::CurveQ& e, const ecq::PointQ& target,
                         std::span<const ecq::PointQ> gens, std::uint64_t p) {
    ecfp::CurveFp efp = ecq::reduce_curve(e, p);
    std::vector<ecfp::FpPoint> rgens;
    for (const auto& g : gens) rgens.push_back(ecq::reduce_point(e, g, p));
    return !ecfp::member_by_closure(efp, ecq::reduce_point(e, target, p), rgens);
}

// the first good primes past the scan bound; used to reject wrong candidates
// with cheap modular arithmetic before any exact verification is attempted
std::vector<std::uint64_t> filter_primes_past(const ecq::CurveQ& e, std::uint64_t bound,
                                              unsigned count) {
    std::vector<std::uint64_t> out;
    const Int disc = e.discriminant();
    for (std::uint64_t q = bound + 1; out.size() < count && q < (std::uint64_t{1} << 32); ++q) {
        if (q % 2 == 0) continue;
        if (!arith::is_prime_u64(q)) continue;
        if (mpz_fdiv_ui(disc.get_mpz_t(), q) == 0) continue;
        out.push_back(q);
    }
    return out;
}

// does mult * P = sum coeffs[i] * gens[i] hold after reduction mod q?
// a true relation always survives (reduction is a homomorphism)
bool ec_relation_holds_mod(const ecq::CurveQ& e, const ecq::PointQ& target,
                           std::span<const ecq::PointQ> gens, std::span<const Int> coeffs,
                           const Int& mult, std::uint64_t q) {
    ecfp::CurveFp efp = ecq::reduce_curve(e, q);
    ecfp::FpPoint lhs = ecfp::scalar_mul(efp, mult, ecq::reduce_point(e, target, q));
    ecfp::FpPoint rhs = ecfp::FpPoint::infinity_point();
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        rhs = ecfp::add(efp, rhs, ecfp::scalar_mul(efp, coeffs[i], ecq::reduce_point(e, gens[i], q)));
    return lhs == rhs;
}

} // namespace

Detection detect_ec(const ecq::CurveQ& e, const ecq::PointQ& p,
                    std::span<const ecq::PointQ> gens, const DetectorConfig& cfg) {
    cfg.validate();
    if (!ecq::on_curve(e, p)) throw InvalidInputError("target point is not on the curve");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (!ecq::on_curve(e, gens[i]))
            throw InvalidInputError("generator " + std::to_string(i + 1) +
                                    " is not on the curve");
        if (auto o = ecq::torsion_order(e, gens[i]))
            throw InvalidInputError("generator " + std::to_string(i + 1) +
                                    " is torsion (order " + std::to_string(*o) +
                                    "); generators must be independent nontorsion points");
    }

    if (p.infinity) {
        Detection out;
        out.report.mode = "ec-detect";
        out.report.seed = cfg.seed;
        out.report.prime_bound = cfg.prime_bound;
        out.verdict.kind = VerdictKind::dependent;
        out.verdict.coeffs.assign(gens.size(), Int(0));
        require(ecq::linear_combination(e, out.verdict.coeffs, gens).infinity,
                "zero combination must be the identity");
        return out;
    }
    if (auto o = ecq::torsion_order(e, p)) {
        // the subgroup generated by independent nontorsion points is free,
        // so a nontrivial torsion point can never lie in it
        Detection out;
        out.report.mode = "ec-detect";
        out.report.seed = cfg.seed;
        out.report.prime_bound = cfg.prime_bound;
        out.report.notes.push_back("target is a torsion point of exact order " +
                                   std::to_string(*o) +
                                   "; the generated subgroup is torsion-free");
        out.verdict.kind = VerdictKind::independent;
        out.verdict.proof = IndependenceProof::torsion_point;
        return out;
    }

    std::vector<ecq::PointQ> gens_v(gens.begin(), gens.end());
    ScanCallbacks cb;
    cb.kernel = [&, gens_v](std::uint64_t q) {
        return ec_prime_kernel(e, p, gens_v, q, cfg.seed, 0);
    };
    cb.reverify = [&, gens_v](std::uint64_t q) {
        return ec_prime_kernel(e, p, gens_v, q, cfg.seed, kReverifyStream);
    };
    cb.closure_confirms_witness = [&, gens_v](std::uint64_t q) {
        return ec_closure_confirms(e, p, gens_v, q);
    };
    const std::vector<std::uint64_t> filters = filter_primes_past(e, cfg.prime_bound, 2);
    cb.verify_exact = [&, gens_v, filters](std::span<const Int> coeffs, const Int& mult,
                                           std::vector<std::string>& notes) {
        for (const Int& c : coeffs)
            if (abs(c) > kVerifyCoeffCap) {
                notes.push_back("candidate exceeds the exact-verification cap");
                return false;
            }
        for (std::uint64_t q : filters)
            if (!ec_relation_holds_mod(e, p, gens_v, coeffs, mult, q)) return false;
        ecq::PointQ lhs = ecq::scalar_mul(e, mult, p);
        return ecq::linear_combination(e, coeffs, gens_v) == lhs;
    };

    Detection det =
        run_scan(ecq::good_primes(e, cfg.prime_bound), gens.size(), "ec-detect", cfg, cb);
    if (det.verdict.kind == VerdictKind::inconclusive)
        det.report.notes.push_back(
            "note: eventual termination with a definite verdict is only guaranteed for "
            "non-CM curves with independent nontorsion generators; any certificate this "
            "tool does emit is unconditional");
    return det;
}

// ================================================================ local report

LocalReport local_report(const ecq::CurveQ& e, std::span<const ecq::PointQ> points,
                         std::uint64_t prime, std::uint64_t seed) {
    LocalReport rep;
    rep.prime = prime;
    if (prime < 3 || !arith::is_prime(Int(static_cast<unsigned long>(prime)))) {
        rep.status = "bad_prime";
        rep.detail = "not an odd prime";
        return rep;
    }
    if (mpz_fdiv_ui(e.discriminant().get_mpz_t(), prime) == 0) {
        rep.status = "bad_prime";
        rep.detail = "prime divides the discriminant";
        return rep;
    }
    for (const auto& pt : points)
        if (!ecq::on_curve(e, pt)) throw InvalidInputError("point is not on the curve");

    std::mt19937_64 rng(arith::derive_seed(seed, prime, 0));
    ecfp::CurveFp efp = ecq::reduce_curve(e, prime);
    auto n = ecfp::count_points(efp, rng);
    if (!n) {
        rep.status = "skipped";
        rep.detail = "ambiguous_order";
        return rep;
    }
    rep.n = *n;
    std::optional<ecfp::GroupStructure> s;
    try {
        s = ecfp::group_structure(efp, *n, rng);
    } catch (const ecfp::BsgsCapExceeded&) {
        rep.status = "skipped";
        rep.detail = "bsgs_table_cap";
        return rep;
    }
    if (!s) {
        rep.status = "skipped";
        rep.detail = "structure_not_found";
        return rep;
    }
    rep.d1 = s->d1;
    rep.d2 = s->d2;
    std::vector<ecfp::FpPoint> reduced;
    for (const auto& pt : points) reduced.push_back(ecq::reduce_point(e, pt, prime));
    for (const auto& pt : reduced) rep.point_coords.push_back(ecfp::coordinates(efp, *s, pt));
    if (!reduced.empty()) {
        std::span<const ecfp::FpPoint> gens(reduced.data() + 1, reduced.size() - 1);
        rep.membership = ecfp::local_membership(efp, *s, reduced[0], gens);
    }
    rep.status = "ok";
    return rep;
}

// ================================================================ witness search

namespace {

struct WitnessOutcome {
    std::uint64_t p = 0;
    bool ok = false;
    bool match = false;
    std::vector<std::uint64_t> l_parts;
};

std::uint64_t l_part(std::uint64_t n, std::uint64_t l) {
    std::uint64_t r = 1;
    while (n % l == 0) {
        n /= l;
        r *= l;
    }
    return r;
}

} // namespace

WitnessSearchResult find_witness_primes(const ecq::CurveQ& e,
                                        std::span<const ecq::PointQ> points,
                                        const WitnessQuery& query, std::uint64_t seed,
                                        int worker_count) {
    query.validate(points.size());
    for (const auto& pt : points)
        if (!ecq::on_curve(e, pt)) throw InvalidInputError("point is not on the curve");

    std::uint64_t lm_needed = 1;
    for (unsigned k = 0; k < query.m; ++k) {
        require(lm_needed <= (std::uint64_t{1} << 62) / query.l, "witness query: l^M overflows");
        lm_needed *= query.l;
    }

    const std::vector<std::uint64_t> primes = ecq::good_primes(e, query.prime_bound);
    std::vector<ecq::PointQ> pts(points.begin(), points.end());

    auto kernel = [&](std::uint64_t p) {
        WitnessOutcome out;
        out.p = p;
        std::mt19937_64 rng(arith::derive_seed(seed, p, 0));
        try {
            ecfp::CurveFp efp = ecq::reduce_curve(e, p);
            auto n = ecfp::count_points(efp, rng);
            if (!n) return out;
            arith::Factorization f = arith::factor_u64(*n);
            out.ok = true;
            out.match = true;
            for (const auto& pt : pts) {
                std::uint64_t o = ecfp::point_order(efp, ecq::reduce_point(e, pt, p), *n, f);
                out.l_parts.push_back(l_part(o, query.l));
            }
            for (unsigned i : query.set_i)
                if (out.l_parts[i - 1] != 1) out.match = false;
            for (unsigned j : query.set_j)
                if (out.l_parts[j - 1] % lm_needed != 0) out.match = false;
        } catch (const std::exception&) {
            out.ok = false;
            out.match = false;
        }
        return out;
    };

    WitnessSearchResult res;
    for (std::size_t base = 0; base < primes.size(); base += scan::kBatchSize) {
        const std::size_t count = std::min(scan::kBatchSize, primes.size() - base);
        auto outcomes = scan::map_items<WitnessOutcome>(
            count, worker_count, [&](std::size_t i) { return kernel(primes[base + i]); });
        for (auto& w : outcomes) {
            if (!w.ok) {
                ++res.skipped;
                continue;
            }
            ++res.scanned;
            if (w.match) res.matches.push_back({w.p, std::move(w.l_parts)});
        }
    }
    res.matched = res.matches.size();
    return res;
}

// ================================================================ multiplicative case

namespace {

using u64 = std::uint64_t;

std::optional<u64> mg_dlog_prime_power(u64 p, u64 base, u64 q, unsigned exp, u64 target) {
    u64 qe = 1;
    for (unsigned i = 0; i < exp; ++i) qe *= q;
    u64 gamma = arith::pow_mod(base, qe / q, p);

    const u64 steps = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(q)))) + 1;
    if (steps > ecfp::kBsgsTableCap)
        throw ecfp::BsgsCapExceeded("multiplicative dlog table above cap at p=" + std::to_string(p));
    std::unordered_map<u64, u64> baby;
    baby.reserve(steps * 2);
    u64 walk = 1;
    for (u64 i = 0; i < steps; ++i) {
        baby.emplace(walk, i);
        walk = arith::mul_mod(walk, gamma, p);
    }
    const u64 stride = arith::inv_mod(arith::pow_mod(gamma, steps, p), p);
    auto dlog_order_q = [&](u64 w) -> std::optional<u64> {
        for (u64 j = 0; j * steps < q + steps; ++j) {
            auto it = baby.find(w);
            if (it != baby.end()) {
                u64 d = j * steps + it->second;
                if (d < q) return d;
            }
            w = arith::mul_mod(w, stride, p);
        }
        return std::nullopt;
    };

    u64 x = 0, qi = 1;
    const u64 inv_base = arith::inv_mod(base, p);
    for (unsigned i = 0; i < exp; ++i) {
        u64 residual = arith::mul_mod(target, arith::pow_mod(inv_base, x, p), p);
        u64 w = arith::pow_mod(residual, qe / (qi * q), p);
        auto digit = dlog_order_q(w);
        if (!digit) return std::nullopt;
        x += *digit * qi;
        qi *= q;
    }
    if (arith::pow_mod(base, x, p) != target) return std::nullopt;
    return x;
}

std::optional<u64> mg_dlog(u64 p, u64 base, u64 m, const arith::Factorization& f, u64 target) {
    if (target == 1) return 0;
    std::vector<arith::Congruence> parts;
    for (const auto& [prime, exp] : f.factors) {
        u64 q = prime.get_ui();
        u64 qe = 1;
        for (unsigned i = 0; i < exp; ++i) qe *= q;
        u64 base_q = arith::pow_mod(base, m / qe, p);
        u64 target_q = arith::pow_mod(target, m / qe, p);
        auto x = mg_dlog_prime_power(p, base_q, q, exp, target_q);
        if (!x) return std::nullopt;
        parts.push_back({Int(static_cast<unsigned long>(*x)), Int(static_cast<unsigned long>(qe))});
    }
    if (parts.empty()) return std::nullopt;
    auto combined = arith::crt(parts);
    require(combined.has_value(), "mg_dlog: prime-power residues cannot conflict");
    u64 x = combined->r.get_ui();
    if (arith::pow_mod(base, x, p) != target) return std::nullopt;
    return x;
}

u64 mg_generator(u64 p, const arith::Factorization& f, std::mt19937_64& rng) {
    while (true) {
        u64 g = 2 + rng() % (p - 2);
        bool primitive = true;
        for (const auto& [prime, exp] : f.factors) {
            (void)exp;
            if (arith::pow_mod(g, (p - 1) / prime.get_ui(), p) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return g;
    }
}

u64 reduce_rational(const Rat& x, u64 p) {
    u64 num = mpz_fdiv_ui(x.get_num().get_mpz_t(), p);
    u64 den = mpz_fdiv_ui(x.get_den().get_mpz_t(), p);
    require(den != 0, "reduce_rational: prime divides a denominator");
    u64 r = arith::mul_mod(num, arith::inv_mod(den, p), p);
    require(r != 0, "reduce_rational: prime divides a numerator");
    return r;
}

PrimeOutcome mul_prime_kernel(const Rat& x, std::span<const Rat> gens, u64 p, u64 seed,
                              u64 stream) {
    PrimeOutcome out;
    out.p = p;
    std::mt19937_64 rng(arith::derive_seed(seed, p, stream));
    try {
        const u64 order = p - 1;
        arith::Factorization f = arith::factor_u64(order);
        const u64 g = mg_generator(p, f, rng);

        auto log_of = [&](const Rat& v) {
            auto d = mg_dlog(p, g, order, f, reduce_rational(v, p));
            require(d.has_value(), "mul kernel: dlog in the full cyclic group must exist");
            return *d;
        };

        ecfp::LocalMembership lm;
        lm.prime = p;
        lm.d1 = 1;
        lm.d2 = order;
        lm.modulus = order;
        lm.target_coords = {0, log_of(x)};
        for (const Rat& v : gens) lm.gen_coords.push_back({0, log_of(v)});

        const std::size_t r = gens.size();
        arith::IntMat a(1, r);
        for (std::size_t k = 0; k < r; ++k)
            a(0, k) = Int(static_cast<unsigned long>(lm.gen_coords[k].second));
        std::vector<Int> b{Int(static_cast<unsigned long>(lm.target_coords.second))};
        std::vector<Int> mods{Int(static_cast<unsigned long>(order))};
        auto sol = arith::solve_congruence_system(a, b, mods);
        if (sol) {
            lm.solvable = true;
            lm.offset = std::move(sol->offset);
            lm.basis = std::move(sol->lattice);
        }
        out.lm = std::move(lm);
        out.ok = true;
    } catch (const ecfp::BsgsCapExceeded&) {
        out.skip_reason = "bsgs_table_cap";
    } catch (const std::exception& ex) {
        out.skip_reason = std::string("error: ") + ex.what();
    }
    return out;
}

bool mul_closure_confirms(const Rat& x, std::span<const Rat> gens, u64 p) {
    std::vector<u64> subgroup{1};
    std::vector<u64> frontier{1};
    auto known = [&](u64 v) {
        return std::find(subgroup.begin(), subgroup.end(), v) != subgroup.end();
    };
    while (!frontier.empty()) {
        std::vector<u64> next;
        for (u64 v : frontier)
            for (const Rat& g : gens) {
                u64 gr = reduce_rational(g, p);
                for (u64 step : {gr, arith::inv_mod(gr, p)}) {
                    u64 w = arith::mul_mod(v, step, p);
                    if (!known(w)) {
                        subgroup.push_back(w);
                        next.push_back(w);
                    }
                }
            }
        frontier = std::move(next);
    }
    return !known(reduce_rational(x, p));
}

// exponent vector of a rational over the union support, plus its sign
struct ExponentVector {
    std::vector<Int> exps; // aligned with the support prime list
    int sign = 1;
};

ExponentVector exponents_over(const Rat& v, std::span<const Int> support) {
    ExponentVector out;
    out.sign = sgn(v) < 0 ? -1 : 1;
    arith::Factorization num = arith::factor(abs(v.get_num()));
    arith::Factorization den = arith::factor(v.get_den());
    for (const Int& q : support) {
        Int e = static_cast<long>(num.exponent_of(q)) - static_cast<long>(den.exponent_of(q));
        out.exps.push_back(e);
    }
    return out;
}

std::vector<Int> support_union(const Rat& x, std::span<const Rat> gens) {
    std::set<Int> primes;
    auto collect = [&](const Rat& v) {
        for (const auto& [q, e] : arith::factor(abs(v.get_num())).factors) {
            (void)e;
            primes.insert(q);
        }
        for (const auto& [q, e] : arith::factor(v.get_den()).factors) {
            (void)e;
            primes.insert(q);
        }
    };
    collect(x);
    for (const Rat& g : gens) collect(g);
    return {primes.begin(), primes.end()};
}

} // namespace

Detection detect_mul(const Rat& x, std::span<const Rat> gens, const DetectorConfig& cfg) {
    cfg.validate();
    if (x == 0) throw InvalidInputError("x must be a nonzero rational");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (gens[i] == 0) throw InvalidInputError("generator " + std::to_string(i + 1) + " is zero");
        if (gens[i] == 1 || gens[i] == -1)
            throw InvalidInputError("generator " + std::to_string(i + 1) +
                                    " is +-1; generators must be multiplicatively independent "
                                    "nontorsion elements");
    }

    Detection pre;
    pre.report.mode = "mul-detect";
    pre.report.seed = cfg.seed;
    pre.report.prime_bound = cfg.prime_bound;
    if (x == 1) {
        pre.verdict.kind = VerdictKind::dependent;
        pre.verdict.coeffs.assign(gens.size(), Int(0));
        return pre;
    }
    if (x == -1) {
        // -1 is the torsion of Q^x; the generated subgroup is torsion-free
        pre.report.notes.push_back("target is -1, the torsion element of the multiplicative group");
        pre.verdict.kind = VerdictKind::independent;
        pre.verdict.proof = IndependenceProof::torsion_point;
        return pre;
    }

    // good primes: odd, outside the support of x and the gens
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p : arith::primes_up_to(cfg.prime_bound)) {
        if (p == 2) continue;
        auto divides = [&](const Rat& v) {
            return mpz_fdiv_ui(v.get_num().get_mpz_t(), p) == 0 ||
                   mpz_fdiv_ui(v.get_den().get_mpz_t(), p) == 0;
        };
        bool bad = divides(x);
        for (const Rat& g : gens) bad = bad || divides(g);
        if (!bad) primes.push_back(p);
    }

    std::vector<Rat> gens_v(gens.begin(), gens.end());
    const std::vector<Int> support = support_union(x, gens_v);
    std::vector<ExponentVector> gen_exps;
    for (const Rat& g : gens_v) gen_exps.push_back(exponents_over(g, support));
    const ExponentVector x_exps = exponents_over(x, support);

    ScanCallbacks cb;
    cb.kernel = [&, gens_v](std::uint64_t q) { return mul_prime_kernel(x, gens_v, q, cfg.seed, 0); };
    cb.reverify = [&, gens_v](std::uint64_t q) {
        return mul_prime_kernel(x, gens_v, q, cfg.seed, kReverifyStream);
    };
    cb.closure_confirms_witness = [&, gens_v](std::uint64_t q) {
        return mul_closure_confirms(x, gens_v, q);
    };
    cb.verify_exact = [&, gen_exps, x_exps](std::span<const Int> coeffs, const Int& mult,
                                            std::vector<std::string>& notes) {
        (void)notes;
        // exact check through factorizations: exponents and the sign
        for (std::size_t k = 0; k < support.size(); ++k) {
            Int lhs = mult * x_exps.exps[k];
            Int rhs = 0;
            for (std::size_t i = 0; i < coeffs.size(); ++i) rhs += coeffs[i] * gen_exps[i].exps[k];
            if (lhs != rhs) return false;
        }
        int lhs_sign = (x_exps.sign == -1 && mpz_odd_p(mult.get_mpz_t())) ? -1 : 1;
        int rhs_sign = 1;
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            if (gen_exps[i].sign == -1 && mpz_odd_p(coeffs[i].get_mpz_t())) rhs_sign = -rhs_sign;
        return lhs_sign == rhs_sign;
    };

    return run_scan(primes, gens.size(), "mul-detect", cfg, cb);
}

} // namespace lindep::detect
