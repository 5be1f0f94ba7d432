#pragma once

// Brute-force oracles used by the tests. Everything here recomputes results
// from first principles (exhaustive enumeration, naive counting, fraction
// Gaussian elimination) so it stays independent of the code paths under test.

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "lindep/detector.hpp"

namespace oracle {

using namespace lindep;

// naive double-loop count of E(F_p), no quadratic-residue shortcuts
inline std::uint64_t brute_count(std::uint64_t p, std::uint64_t a, std::uint64_t b) {
    std::uint64_t n = 1;
    for (std::uint64_t x = 0; x < p; ++x) {
        std::uint64_t rhs = (x * x % p * x + a * x + b) % p;
        for (std::uint64_t y = 0; y < p; ++y)
            if (y * y % p == rhs) ++n;
    }
    return n;
}

// all affine points plus infinity, by the same naive loop
inline std::vector<ecfp::FpPoint> brute_points(const ecfp::CurveFp& e) {
    std::vector<ecfp::FpPoint> pts{ecfp::FpPoint::infinity_point()};
    for (std::uint64_t x = 0; x < e.p; ++x)
        for (std::uint64_t y = 0; y < e.p; ++y) {
            std::uint64_t rhs = (x * x % e.p * x + e.a * x + e.b) % e.p;
            if (y * y % e.p == rhs) pts.push_back(ecfp::FpPoint::affine(x, y));
        }
    return pts;
}

// subgroup closure by breadth-first search over generator steps
inline std::set<std::pair<std::uint64_t, std::uint64_t>> closure(
    const ecfp::CurveFp& e, const std::vector<ecfp::FpPoint>& gens) {
    auto key = [&](const ecfp::FpPoint& q) {
        return q.infinity ? std::make_pair(e.p, e.p) : std::make_pair(q.x, q.y);
    };
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen{key(ecfp::FpPoint::infinity_point())};
    std::vector<ecfp::FpPoint> frontier{ecfp::FpPoint::infinity_point()};
    while (!frontier.empty()) {
        std::vector<ecfp::FpPoint> next;
        for (const auto& pt : frontier)
            for (const auto& g : gens)
                for (const auto& step : {g, ecfp::negate(e, g)}) {
                    ecfp::FpPoint q = ecfp::add(e, pt, step);
                    if (seen.insert(key(q)).second) next.push_back(q);
                }
        frontier = std::move(next);
    }
    return seen;
}

inline bool closure_member(const ecfp::CurveFp& e, const ecfp::FpPoint& target,
                           const std::vector<ecfp::FpPoint>& gens) {
    auto cl = closure(e, gens);
    auto key = target.infinity ? std::make_pair(e.p, e.p) : std::make_pair(target.x, target.y);
    return cl.count(key) != 0;
}

// order by repeated addition (independent of the factorization-based path)
inline std::uint64_t order_by_iteration(const ecfp::CurveFp& e, const ecfp::FpPoint& pt) {
    std::uint64_t o = 1;
    ecfp::FpPoint acc = pt;
    while (!acc.infinity) {
        acc = ecfp::add(e, acc, pt);
        ++o;
    }
    return o;
}

// order as the least divisor d of n with d * P = infinity
inline std::uint64_t order_by_divisors(const ecfp::CurveFp& e, const ecfp::FpPoint& pt,
                                       std::uint64_t n) {
    std::vector<std::uint64_t> divs;
    for (std::uint64_t d = 1; d * d <= n; ++d)
        if (n % d == 0) {
            divs.push_back(d);
            divs.push_back(n / d);
        }
    std::sort(divs.begin(), divs.end());
    for (std::uint64_t d : divs)
        if (ecfp::scalar_mul(e, d, pt).infinity) return d;
    return 0;
}

// exhaustive coefficient-box search over E(Q): all c with |c_i| <= bound and
// sum c_i P_i == target
inline std::vector<std::vector<Int>> box_relations(const ecq::CurveQ& e,
                                                   const std::vector<ecq::PointQ>& gens,
                                                   const ecq::PointQ& target, long bound) {
    std::vector<std::vector<Int>> found;
    std::vector<long> c(gens.size(), -bound);
    if (gens.empty()) {
        if (target.infinity) found.push_back({});
        return found;
    }
    while (true) {
        std::vector<Int> coeffs(c.begin(), c.end());
        if (ecq::linear_combination(e, coeffs, gens) == target) found.push_back(coeffs);
        std::size_t i = 0;
        while (i < c.size() && c[i] == bound) c[i++] = -bound;
        if (i == c.size()) break;
        ++c[i];
    }
    return found;
}

// ------------------------------------------------------------ Q^x oracle

struct MulInstance {
    Rat x;
    std::vector<Rat> gens;
};

struct MulOracleVerdict {
    bool dependent = false;
    std::vector<Int> coeffs;
};

// decide x in <gens> by factoring into exponent vectors and solving the
// rational linear system by fraction Gaussian elimination; the sign is
// checked on the integer solution
inline MulOracleVerdict mul_oracle(const Rat& x, const std::vector<Rat>& gens) {
    std::set<Int> support;
    auto collect = [&](const Rat& v) {
        for (const auto& [q, e] : arith::factor(abs(v.get_num())).factors) {
            (void)e;
            support.insert(q);
        }
        for (const auto& [q, e] : arith::factor(v.get_den()).factors) {
            (void)e;
            support.insert(q);
        }
    };
    collect(x);
    for (const auto& g : gens) collect(g);
    std::vector<Int> primes(support.begin(), support.end());

    auto exps = [&](const Rat& v) {
        std::vector<Rat> row;
        arith::Factorization num = arith::factor(abs(v.get_num()));
        arith::Factorization den = arith::factor(v.get_den());
        for (const Int& q : primes)
            row.push_back(Rat(static_cast<long>(num.exponent_of(q)) -
                              static_cast<long>(den.exponent_of(q))));
        return row;
    };

    const std::size_t k = primes.size(), r = gens.size();
    // rows: one per support prime; columns: gens; rhs: x
    std::vector<std::vector<Rat>> m(k, std::vector<Rat>(r + 1));
    for (std::size_t j = 0; j < r; ++j) {
        auto col = exps(gens[j]);
        for (std::size_t i = 0; i < k; ++i) m[i][j] = col[i];
    }
    auto xe = exps(x);
    for (std::size_t i = 0; i < k; ++i) m[i][r] = xe[i];

    std::size_t row = 0;
    std::vector<std::size_t> pivot_col;
    for (std::size_t col = 0; col < r && row < k; ++col) {
        std::size_t piv = row;
        while (piv < k && m[piv][col] == 0) ++piv;
        if (piv == k) continue;
        std::swap(m[row], m[piv]);
        for (std::size_t i = 0; i < k; ++i) {
            if (i == row || m[i][col] == 0) continue;
            Rat f = m[i][col] / m[row][col];
            for (std::size_t j = col; j <= r; ++j) m[i][j] -= f * m[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t i = row; i < k; ++i)
        if (m[i][r] != 0) return {};            // no rational solution
    if (pivot_col.size() < r) return {};        // gens not independent; not generated here

    std::vector<Rat> sol(r);
    for (std::size_t i = 0; i < r; ++i) sol[pivot_col[i]] = m[i][r] / m[i][pivot_col[i]];
    std::vector<Int> coeffs(r);
    for (std::size_t i = 0; i < r; ++i) {
        if (sol[i].get_den() != 1) return {};   // non-integer exponents
        coeffs[i] = sol[i].get_num();
    }
    int want = sgn(x) < 0 ? -1 : 1;
    int got = 1;
    for (std::size_t i = 0; i < r; ++i)
        if (sgn(gens[i]) < 0 && mpz_odd_p(coeffs[i].get_mpz_t())) got = -got;
    if (want != got) return {};
    return {true, coeffs};
}

// random instance with multiplicatively independent gens (full-rank exponent
// matrix over the chosen support)
inline MulInstance random_mul_instance(std::mt19937_64& rng) {
    static const long pool[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    const std::size_t r = 1 + rng() % 3;
    const std::size_t k = r + 1 + rng() % 2;

    std::vector<long> primes;
    {
        std::vector<long> all(std::begin(pool), std::end(pool));
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + rng() % (all.size() - i);
            std::swap(all[i], all[j]);
            primes.push_back(all[i]);
        }
    }

    auto rank_over_q = [&](const std::vector<std::vector<long>>& e) {
        std::vector<std::vector<Rat>> m(e.size());
        for (std::size_t i = 0; i < e.size(); ++i)
            for (long v : e[i]) m[i].push_back(Rat(v));
        std::size_t rank = 0;
        for (std::size_t col = 0; col < k && rank < e.size(); ++col) {
            std::size_t piv = rank;
            while (piv < e.size() && m[piv][col] == 0) ++piv;
            if (piv == e.size()) continue;
            std::swap(m[rank], m[piv]);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (i == rank || m[i][col] == 0) continue;
                Rat f = m[i][col] / m[rank][col];
                for (std::size_t j = 0; j < k; ++j) m[i][j] -= f * m[rank][j];
            }
            ++rank;
        }
        return rank;
    };

    std::vector<std::vector<long>> e(r, std::vector<long>(k));
    do {
        for (auto& row : e)
            for (auto& v : row) v = static_cast<long>(rng() % 21) - 10;
    } while (rank_over_q(e) < r);

    auto build = [&](const std::vector<long>& exps, bool negative) {
        Rat v(negative ? -1 : 1);
        for (std::size_t j = 0; j < k; ++j) {
            if (exps[j] >= 0)
                for (long t = 0; t < exps[j]; ++t) v *= primes[j];
            else
                for (long t = 0; t < -exps[j]; ++t) v /= primes[j];
        }
        return v;
    };

    MulInstance inst;
    for (std::size_t i = 0; i < r; ++i) inst.gens.push_back(build(e[i], rng() & 1));

    if (rng() & 1) {
        // dependent: x = prod gens^c for small c
        std::vector<long> c(r);
        for (auto& v : c) v = static_cast<long>(rng() % 9) - 4;
        Rat x(1);
        for (std::size_t i = 0; i < r; ++i) {
            long ci = c[i];
            Rat base = ci >= 0 ? inst.gens[i] : Rat(1) / inst.gens[i];
            for (long t = 0; t < std::abs(ci); ++t) x *= base;
        }
        inst.x = x;
    } else {
        std::vector<long> exps(k);
        for (auto& v : exps) v = static_cast<long>(rng() % 21) - 10;
        inst.x = build(exps, rng() & 1);
    }
    return inst;
}

} // namespace oracle
