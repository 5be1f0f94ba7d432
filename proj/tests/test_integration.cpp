// End-to-end stress: randomized dependent/independent instances on curves of
// positive rank, saturation-adjacent traps, and rational targets in Q^x.

#include <doctest.h>

#include <chrono>
#include <random>

#include "lindep/detector.hpp"
#include "oracle_helpers.hpp"

using namespace lindep;
using detect::DetectorConfig;
using detect::VerdictKind;
using ecq::CurveQ;
using ecq::PointQ;

namespace {

PointQ pt(long x, long y) { return PointQ::affine(Rat(x), Rat(y)); }

DetectorConfig cfg_with_seed(std::uint64_t seed, std::uint64_t bound = 20'000) {
    DetectorConfig cfg;
    cfg.prime_bound = bound;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_SUITE_BEGIN("integration");

TEST_CASE("random combinations are recovered exactly on a rank-2 curve") {
    CurveQ e(Int(0), Int(17));
    std::vector<PointQ> gens{pt(-2, 3), pt(2, 5)};
    std::mt19937_64 rng(404);
    for (int i = 0; i < 12; ++i) {
        std::vector<Int> c{Int(static_cast<long>(rng() % 17)) - 8,
                           Int(static_cast<long>(rng() % 17)) - 8};
        PointQ target = ecq::linear_combination(e, c, gens);
        if (target.infinity) continue; // the zero combination short-circuits
        CAPTURE(c[0].get_str());
        CAPTURE(c[1].get_str());
        auto det = detect::detect_ec(e, target, gens, cfg_with_seed(1000 + i));
        REQUIRE(det.verdict.kind == VerdictKind::dependent);
        CHECK(det.verdict.coeffs == c);
        CHECK(det.report.saturation_alarms == 0);
    }
}

TEST_CASE("multiples of the target do not fool the detector") {
    // P is not in <2P> or <3P>, although a multiple of P is: the verdict must
    // be independence via a witness prime, never a saturation relation
    CurveQ e(Int(0), Int(17));
    PointQ p1 = pt(-2, 3);
    for (long a : {2, 3, 5}) {
        std::vector<PointQ> gens{ecq::scalar_mul(e, Int(a), p1)};
        auto det = detect::detect_ec(e, p1, gens, cfg_with_seed(77 + a));
        CAPTURE(a);
        REQUIRE(det.verdict.kind == VerdictKind::independent);
        CHECK(det.verdict.proof == detect::IndependenceProof::witness_prime);
        CHECK(det.report.saturation_alarms == 0);
    }

    // same trap in the multiplicative group: 2 vs <4>, 3 vs <27>
    auto d4 = detect::detect_mul(Rat(2), std::vector<Rat>{Rat(4)}, cfg_with_seed(5));
    CHECK(d4.verdict.kind == VerdictKind::independent);
    auto d27 = detect::detect_mul(Rat(3), std::vector<Rat>{Rat(27)}, cfg_with_seed(6));
    CHECK(d27.verdict.kind == VerdictKind::independent);
    CHECK(d4.report.saturation_alarms + d27.report.saturation_alarms == 0);
}

TEST_CASE("rank-1 curves with and without torsion") {
    struct Row {
        CurveQ e;
        PointQ gen;
    };
    std::vector<Row> rows{{CurveQ(Int(0), Int(-2)), pt(3, 5)},
                          {CurveQ(Int(0), Int(3)), pt(1, 2)},
                          {CurveQ(Int(-36), Int(0)), pt(-3, 9)}};
    int idx = 0;
    for (const auto& row : rows) {
        ++idx;
        REQUIRE(ecq::on_curve(row.e, row.gen));
        REQUIRE_FALSE(ecq::torsion_order(row.e, row.gen).has_value());
        std::vector<PointQ> gens{row.gen};

        for (long c : {1, -3, 7}) {
            PointQ target = ecq::scalar_mul(row.e, Int(c), row.gen);
            auto det = detect::detect_ec(row.e, target, gens, cfg_with_seed(300 + idx));
            CAPTURE(idx);
            CAPTURE(c);
            REQUIRE(det.verdict.kind == VerdictKind::dependent);
            CHECK(det.verdict.coeffs == std::vector<Int>{Int(c)});
        }
    }
}

TEST_CASE("torsion shift knocks a point out of the free subgroup") {
    // T = (6,0) + 2G on y^2 = x^3 - 36x: nontorsion, but T - 2G is 2-torsion,
    // so T is not an integer multiple of G
    CurveQ e(Int(-36), Int(0));
    PointQ g = pt(-3, 9);
    PointQ target = ecq::add(e, pt(6, 0), ecq::scalar_mul(e, Int(2), g));
    REQUIRE_FALSE(ecq::torsion_order(e, target, 16).has_value());
    std::vector<PointQ> gens{g};
    auto det = detect::detect_ec(e, target, gens, cfg_with_seed(21));
    REQUIRE(det.verdict.kind == VerdictKind::independent);
    CHECK(det.verdict.proof == detect::IndependenceProof::witness_prime);
    CHECK(det.verdict.witness_prime > 0);
    CHECK(det.report.saturation_alarms == 0);
}

TEST_CASE("rational targets and generators in the multiplicative group") {
    std::vector<Rat> g{Rat(Int(2), Int(3))};
    auto cfg = cfg_with_seed(9);

    auto sq = detect::detect_mul(Rat(Int(4), Int(9)), g, cfg);
    REQUIRE(sq.verdict.kind == VerdictKind::dependent);
    CHECK(sq.verdict.coeffs == std::vector<Int>{Int(2)});

    auto cube = detect::detect_mul(Rat(Int(8), Int(27)), g, cfg);
    REQUIRE(cube.verdict.kind == VerdictKind::dependent);
    CHECK(cube.verdict.coeffs == std::vector<Int>{Int(3)});

    auto inv = detect::detect_mul(Rat(Int(3), Int(2)), g, cfg);
    REQUIRE(inv.verdict.kind == VerdictKind::dependent);
    CHECK(inv.verdict.coeffs == std::vector<Int>{Int(-1)});

    // right magnitude, wrong sign
    auto neg = detect::detect_mul(Rat(Int(-8), Int(27)), g, cfg);
    CHECK(neg.verdict.kind == VerdictKind::independent);
    CHECK(neg.report.saturation_alarms == 0);
}

TEST_CASE("large coefficients are recovered from a very tall target") {
    // the target coordinates here run to tens of thousands of bits; wrong
    // intermediate candidates must be rejected by modular filtering long
    // before any exact arithmetic is attempted
    CurveQ e(Int(0), Int(17));
    std::vector<PointQ> gens{pt(-2, 3), pt(2, 5)};
    std::vector<Int> c{Int(300), Int(-251)};
    PointQ target = ecq::linear_combination(e, c, gens);
    CHECK(mpz_sizeinbase(target.x.get_num().get_mpz_t(), 2) > 50'000);

    auto t0 = std::chrono::steady_clock::now();
    auto det = detect::detect_ec(e, target, gens, cfg_with_seed(3, 100'000));
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(det.verdict.kind == VerdictKind::dependent);
    CHECK(det.verdict.coeffs == c);
    CHECK(dt < 10.0);
}

TEST_CASE("dependent declared generators still yield correct verdicts") {
    // the generator-independence hypothesis is the caller's to uphold, but a
    // violation must never produce a wrong certificate
    CurveQ e(Int(0), Int(17));
    PointQ p1 = pt(-2, 3), p2 = pt(2, 5);
    std::vector<PointQ> gens{p1, ecq::scalar_mul(e, Int(2), p1)}; // dependent pair

    // a target genuinely inside the span: any verified relation is acceptable
    PointQ inside = ecq::scalar_mul(e, Int(3), p1);
    auto dep = detect::detect_ec(e, inside, gens, cfg_with_seed(51));
    REQUIRE(dep.verdict.kind == VerdictKind::dependent);
    CHECK(ecq::linear_combination(e, dep.verdict.coeffs, gens) == inside);

    // a target outside the span: independence must still be certified
    auto ind = detect::detect_ec(e, p2, gens, cfg_with_seed(52));
    REQUIRE(ind.verdict.kind == VerdictKind::independent);
    CHECK(ind.verdict.proof == detect::IndependenceProof::witness_prime);
    CHECK(ind.report.saturation_alarms + dep.report.saturation_alarms == 0);
}

TEST_CASE("no generators at all") {
    // x = 6 is 1 mod 5 (locally trivial) but not 1 mod 7: the scan must walk
    // past the uninformative prime and certify with the next one
    auto det = detect::detect_mul(Rat(6), {}, cfg_with_seed(53));
    REQUIRE(det.verdict.kind == VerdictKind::independent);
    CHECK(det.verdict.witness_prime == 7);
}

TEST_CASE("thread counts never change any fixture verdict") {
    CurveQ e(Int(0), Int(17));
    std::vector<PointQ> gens{pt(-2, 3), pt(2, 5)};
    std::vector<PointQ> targets{pt(4, 9), pt(8, 23), pt(-2, -3)};
    for (const auto& target : targets) {
        auto c1 = cfg_with_seed(31);
        auto c4 = cfg_with_seed(31);
        c4.worker_count = 4;
        auto a = detect::detect_ec(e, target, gens, c1);
        auto b = detect::detect_ec(e, target, gens, c4);
        CHECK(a.verdict.kind == b.verdict.kind);
        CHECK(a.verdict.coeffs == b.verdict.coeffs);
        CHECK(a.report.primes_processed == b.report.primes_processed);
    }
}

TEST_SUITE_END();
