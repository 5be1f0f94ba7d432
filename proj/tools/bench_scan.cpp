// Benchmark: OpenMP per-prime scan vs the serial reference on the
// witness-search workload (point counting, factoring, point orders for
// every good prime up to the bound).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "lindep/detector.hpp"
#include "lindep/scan.hpp"

using namespace lindep;

namespace {

double run_once(const ecq::CurveQ& e, const std::vector<ecq::PointQ>& pts,
                const detect::WitnessQuery& q, int threads, std::uint64_t* matched) {
    auto t0 = std::chrono::steady_clock::now();
    auto res = detect::find_witness_primes(e, pts, q, /*seed=*/7, threads);
    auto t1 = std::chrono::steady_clock::now();
    if (matched) *matched = res.matched;
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    std::uint64_t bound = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 100'000;
    int max_threads = argc > 2 ? std::atoi(argv[2]) : 8;

    ecq::CurveQ e(Int(0), Int(17));
    std::vector<ecq::PointQ> pts{ecq::PointQ::affine(Rat(-2), Rat(3)),
                                 ecq::PointQ::affine(Rat(2), Rat(5))};
    detect::WitnessQuery q;
    q.set_i = {1};
    q.set_j = {2};
    q.l = 2;
    q.m = 2;
    q.prime_bound = bound;

    std::printf("witness-search scan, prime bound %llu\n", (unsigned long long)bound);
    std::uint64_t matched_serial = 0;
    double serial = run_once(e, pts, q, 1, &matched_serial);
    std::printf("%8s  %10s  %8s  %s\n", "threads", "seconds", "speedup", "matches");
    std::printf("%8s  %10.3f  %8.2f  %llu\n", "serial", serial, 1.0,
                (unsigned long long)matched_serial);
    for (int t = 2; t <= max_threads; t *= 2) {
        std::uint64_t matched = 0;
        double dt = run_once(e, pts, q, t, &matched);
        std::printf("%8d  %10.3f  %8.2f  %llu%s\n", t, dt, serial / dt,
                    (unsigned long long)matched,
                    matched == matched_serial ? "" : "  MISMATCH");
    }
    return 0;
}
