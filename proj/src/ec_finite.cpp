#include "lindep/ec_finite.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace lindep::ecfp {

using arith::inv_mod;
using arith::mul_mod;

CurveFp::CurveFp(u64 p_, u64 a_, u64 b_) : p(p_), a(a_ % p_), b(b_ % p_) {
    require(p >= 3 && (p & 1), "CurveFp: modulus must be an odd prime");
    require(p < (u64{1} << 32), "CurveFp: primes up to 2^32 supported");
    u64 disc = (4 * mul_mod(mul_mod(a, a, p), a, p) + 27 * mul_mod(b, b, p)) % p;
    require(disc != 0, "CurveFp: singular reduction");
}

bool on_curve(const CurveFp& e, const FpPoint& pt) {
    if (pt.infinity) return true;
    u64 lhs = mul_mod(pt.y, pt.y, e.p);
    u64 rhs = (mul_mod(mul_mod(pt.x, pt.x, e.p), pt.x, e.p) + mul_mod(e.a, pt.x, e.p) + e.b) % e.p;
    return lhs == rhs;
}

FpPoint negate(const CurveFp& e, const FpPoint& pt) {
    if (pt.infinity) return pt;
    return FpPoint::affine(pt.x, pt.y == 0 ? 0 : e.p - pt.y);
}

FpPoint add(const CurveFp& e, const FpPoint& p, const FpPoint& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    const u64 mod = e.p;
    u64 lambda;
    if (p.x == q.x) {
        if ((p.y + q.y) % mod == 0) return FpPoint::infinity_point();
        u64 num = (3 * mul_mod(p.x, p.x, mod) + e.a) % mod;
        lambda = mul_mod(num, inv_mod((2 * p.y) % mod, mod), mod);
    } else {
        u64 dy = (q.y + mod - p.y) % mod;
        u64 dx = (q.x + mod - p.x) % mod;
        lambda = mul_mod(dy, inv_mod(dx, mod), mod);
    }
    u64 x3 = (mul_mod(lambda, lambda, mod) + 2 * mod - p.x - q.x) % mod;
    u64 y3 = (mul_mod(lambda, (p.x + mod - x3) % mod, mod) + mod - p.y) % mod;
    return FpPoint::affine(x3, y3);
}

FpPoint scalar_mul(const CurveFp& e, u64 n, const FpPoint& p) {
    FpPoint acc = FpPoint::infinity_point();
    FpPoint base = p;
    while (n) {
        if (n & 1) acc = add(e, acc, base);
        base = add(e, base, base);
        n >>= 1;
    }
    return acc;
}

FpPoint scalar_mul(const CurveFp& e, const Int& n, const FpPoint& p) {
    if (n >= 0 && n.fits_ulong_p()) return scalar_mul(e, n.get_ui(), p);
    Int k = abs(n);
    FpPoint base = n < 0 ? negate(e, p) : p;
    FpPoint acc = FpPoint::infinity_point();
    for (long bit = mpz_sizeinbase(k.get_mpz_t(), 2) - 1; bit >= 0; --bit) {
        acc = add(e, acc, acc);
        if (mpz_tstbit(k.get_mpz_t(), bit)) acc = add(e, acc, base);
    }
    return acc;
}

std::vector<FpPoint> enumerate_points(const CurveFp& e) {
    std::vector<FpPoint> pts{FpPoint::infinity_point()};
    for (u64 x = 0; x < e.p; ++x) {
        u64 rhs = (mul_mod(mul_mod(x, x, e.p), x, e.p) + mul_mod(e.a, x, e.p) + e.b) % e.p;
        if (rhs == 0) {
            pts.push_back(FpPoint::affine(x, 0));
        } else if (auto y = arith::sqrt_mod(rhs, e.p)) {
            pts.push_back(FpPoint::affine(x, *y));
            pts.push_back(FpPoint::affine(x, e.p - *y));
        }
    }
    return pts;
}

// ---------------------------------------------------------------- counting

namespace {

u64 pack(const CurveFp& e, const FpPoint& pt) {
    // distinct key for table lookups; p^2 must fit in 64 bits
    return pt.infinity ? e.p * e.p : pt.x * e.p + pt.y;
}

FpPoint random_point(const CurveFp& e, std::mt19937_64& rng) {
    while (true) {
        u64 x = rng() % e.p;
        u64 rhs = (mul_mod(mul_mod(x, x, e.p), x, e.p) + mul_mod(e.a, x, e.p) + e.b) % e.p;
        if (rhs == 0) return FpPoint::affine(x, 0);
        if (auto y = arith::sqrt_mod(rhs, e.p))
            return (rng() & 1) ? FpPoint::affine(x, e.p - *y) : FpPoint::affine(x, *y);
    }
}

u64 brute_count(const CurveFp& e) {
    // quadratic-residue table, then one pass over x
    std::vector<char> is_qr(e.p, 0);
    for (u64 y = 0; y < e.p; ++y) is_qr[mul_mod(y, y, e.p)] = 1;
    u64 n = 1; // infinity
    for (u64 x = 0; x < e.p; ++x) {
        u64 rhs = (mul_mod(mul_mod(x, x, e.p), x, e.p) + mul_mod(e.a, x, e.p) + e.b) % e.p;
        if (rhs == 0)
            n += 1;
        else if (is_qr[rhs])
            n += 2;
    }
    return n;
}

// Some m in [lo, hi] with m * P = infinity (there is at least one whenever
// the group order lies in the interval).
std::optional<u64> multiple_in_interval(const CurveFp& e, const FpPoint& p, u64 lo, u64 hi) {
    const u64 width = hi - lo + 1;
    const u64 steps = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(width)))) + 1;
    if (steps > kBsgsTableCap)
        throw BsgsCapExceeded("interval BSGS table above cap at p=" + std::to_string(e.p));

    std::unordered_map<u64, u64> baby; // i * P -> smallest i
    baby.reserve(steps * 2);
    FpPoint walk = FpPoint::infinity_point();
    for (u64 i = 0; i < steps; ++i) {
        baby.emplace(pack(e, walk), i); // keeps the smallest i on collisions
        walk = add(e, walk, p);
    }
    // m = lo + j*steps + i  <=>  -(lo + j*steps) P = i P
    FpPoint giant = negate(e, scalar_mul(e, lo, p));
    FpPoint stride = negate(e, scalar_mul(e, steps, p));
    for (u64 j = 0; lo + j * steps <= hi; ++j) {
        auto it = baby.find(pack(e, giant));
        if (it != baby.end()) {
            u64 m = lo + j * steps + it->second;
            if (m <= hi && scalar_mul(e, m, p).infinity) return m;
        }
        giant = add(e, giant, stride);
    }
    return std::nullopt;
}

} // namespace

std::optional<u64> count_points(const CurveFp& e, std::mt19937_64& rng, const CountOptions& opts) {
    if (e.p <= opts.brute_threshold) return brute_count(e);

    // Hasse interval [p+1-2sqrt(p), p+1+2sqrt(p)]
    Int fourp = Int(static_cast<unsigned long>(e.p)) * 4;
    u64 two_sqrt = mpz_class(sqrt(fourp)).get_ui();
    const u64 lo = e.p + 1 - two_sqrt;
    const u64 hi = e.p + 1 + two_sqrt;

    u64 order_lcm = 1;
    for (unsigned it = 0; it < opts.sample_budget; ++it) {
        FpPoint pt = random_point(e, rng);
        auto m = multiple_in_interval(e, pt, lo, hi);
        require(m.has_value(), "count_points: no annihilator in the Hasse interval");
        u64 o = point_order(e, pt, *m, arith::factor_u64(*m));
        order_lcm = std::lcm(order_lcm, o);

        u64 k_lo = (lo + order_lcm - 1) / order_lcm;
        u64 k_hi = hi / order_lcm;
        require(k_lo <= k_hi, "count_points: lcm of orders has no multiple in the interval");
        if (k_lo == k_hi) {
            u64 n = k_lo * order_lcm;
            require(lo <= n && n <= hi, "count_points: Hasse bound violated");
            return n;
        }
    }
    return std::nullopt; // AmbiguousOrder: exponent too small to pin the order down
}

u64 point_order(const CurveFp& e, const FpPoint& p, u64 n, const arith::Factorization& f) {
    require(scalar_mul(e, n, p).infinity, "point_order: n does not annihilate P");
    u64 o = n;
    for (const auto& [prime, exp] : f.factors) {
        u64 q = prime.get_ui();
        for (unsigned k = 0; k < exp && o % q == 0; ++k) {
            if (!scalar_mul(e, o / q, p).infinity) break;
            o /= q;
        }
    }
    return o;
}

// ---------------------------------------------------------------- dlog

namespace {

// dlog in the cyclic group <base> of prime-power order q^e
std::optional<u64> dlog_prime_power(const CurveFp& e, const FpPoint& base, u64 q, unsigned exp,
                                    const FpPoint& target) {
    // gamma has order q; one shared BSGS table serves every digit
    u64 qe = 1;
    for (unsigned i = 0; i < exp; ++i) qe *= q;
    FpPoint gamma = scalar_mul(e, qe / q, base);

    const u64 steps = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(q)))) + 1;
    if (steps > kBsgsTableCap)
        throw BsgsCapExceeded("dlog BSGS table above cap at p=" + std::to_string(e.p));
    std::unordered_map<u64, u64> baby;
    baby.reserve(steps * 2);
    FpPoint walk = FpPoint::infinity_point();
    for (u64 i = 0; i < steps; ++i) {
        baby.emplace(pack(e, walk), i);
        walk = add(e, walk, gamma);
    }
    FpPoint stride = negate(e, scalar_mul(e, steps, gamma));
    auto dlog_order_q = [&](FpPoint w) -> std::optional<u64> {
        for (u64 j = 0; j * steps < q + steps; ++j) {
            auto it = baby.find(pack(e, w));
            if (it != baby.end()) {
                u64 d = j * steps + it->second;
                if (d < q) return d;
            }
            w = add(e, w, stride);
        }
        return std::nullopt;
    };

    u64 x = 0;          // accumulates digits base q
    u64 qi = 1;         // q^i
    FpPoint minus_base = negate(e, base);
    for (unsigned i = 0; i < exp; ++i) {
        // w = q^(e-1-i) * (target - x * base) must land in <gamma>
        FpPoint residual = add(e, target, scalar_mul(e, x, minus_base));
        FpPoint w = scalar_mul(e, qe / (qi * q), residual);
        auto digit = dlog_order_q(w);
        if (!digit) return std::nullopt;
        x += *digit * qi;
        qi *= q;
    }
    if (!(scalar_mul(e, x, base) == target)) return std::nullopt;
    return x;
}

} // namespace

std::optional<u64> dlog(const CurveFp& e, const FpPoint& base, u64 m,
                        const arith::Factorization& f, const FpPoint& target) {
    if (target.infinity) return 0;
    std::vector<arith::Congruence> parts;
    for (const auto& [prime, exp] : f.factors) {
        u64 q = prime.get_ui();
        u64 qe = 1;
        for (unsigned i = 0; i < exp; ++i) qe *= q;
        FpPoint base_q = scalar_mul(e, m / qe, base);
        FpPoint target_q = scalar_mul(e, m / qe, target);
        auto x = dlog_prime_power(e, base_q, q, exp, target_q);
        if (!x) return std::nullopt;
        parts.push_back({Int(static_cast<unsigned long>(*x)), Int(static_cast<unsigned long>(qe))});
    }
    if (parts.empty()) return target.infinity ? std::optional<u64>(0) : std::nullopt;
    auto combined = arith::crt(parts);
    require(combined.has_value(), "dlog: prime-power residues cannot conflict");
    u64 x = combined->r.get_ui();
    if (!(scalar_mul(e, x, base) == target)) return std::nullopt;
    return x;
}

// ---------------------------------------------------------------- group structure

namespace {

u64 pp(u64 q, unsigned e) {
    u64 r = 1;
    while (e--) r *= q;
    return r;
}

// element of order lcm(o1, o2) from elements of orders o1, o2
std::pair<FpPoint, u64> combine_orders(const CurveFp& e, const FpPoint& p1, u64 o1,
                                       const FpPoint& p2, u64 o2,
                                       const arith::Factorization& nf) {
    u64 m1 = 1, m2 = 1; // coprime split of lcm
    for (const auto& [prime, exp] : nf.factors) {
        (void)exp;
        u64 q = prime.get_ui();
        u64 q1 = 1, q2 = 1;
        u64 t = o1;
        while (t % q == 0) { q1 *= q; t /= q; }
        t = o2;
        while (t % q == 0) { q2 *= q; t /= q; }
        if (q1 >= q2)
            m1 *= q1;
        else
            m2 *= q2;
    }
    FpPoint g = add(e, scalar_mul(e, o1 / m1, p1), scalar_mul(e, o2 / m2, p2));
    return {g, m1 * m2};
}

} // namespace

std::optional<GroupStructure> group_structure(const CurveFp& e, u64 n, std::mt19937_64& rng,
                                              const StructureOptions& opts) {
    GroupStructure s;
    s.n = n;
    s.n_factors = arith::factor_u64(n);

    if (n == 1) {
        s.d1 = s.d2 = 1;
        s.g1 = s.g2 = FpPoint::infinity_point();
        return s;
    }

    // find the exponent d2 and a point realizing it
    FpPoint g2 = FpPoint::infinity_point();
    u64 d2 = 1;
    unsigned stable = 0;
    unsigned used = 0;
    for (; used < opts.sample_budget; ++used) {
        FpPoint r = random_point(e, rng);
        u64 o = point_order(e, r, n, s.n_factors);
        if (d2 % o != 0) {
            std::tie(g2, d2) = combine_orders(e, g2, d2, r, o, s.n_factors);
            stable = 0;
        } else {
            ++stable;
        }
        u64 d1 = n / d2;
        if (n % d2 == 0 && d2 % d1 == 0 && (e.p - 1) % d1 == 0 && stable >= 6) break;
    }
    u64 d1 = n / d2;
    if (n % d2 != 0 || d2 % d1 != 0 || (e.p - 1) % d1 != 0)
        return std::nullopt; // exponent not located within budget
    require(point_order(e, g2, n, s.n_factors) == d2, "group_structure: wrong g2 order");

    s.d1 = d1;
    s.d2 = d2;
    s.g2 = g2;
    if (d1 == 1) {
        s.g1 = FpPoint::infinity_point();
        return s;
    }

    // per q-primary component, a complement generator u_q of order q^alpha
    // meeting <h_q> trivially; certified by dlog failures
    std::vector<FpPoint> parts;
    std::vector<u64> part_orders;
    for (const auto& [prime, exp] : s.n_factors.factors) {
        (void)exp;
        u64 q = prime.get_ui();
        unsigned alpha = 0, beta = 0;
        u64 t = d1;
        while (t % q == 0) { ++alpha; t /= q; }
        t = d2;
        while (t % q == 0) { ++beta; t /= q; }
        if (alpha == 0) continue;

        u64 qa = pp(q, alpha), qb = pp(q, beta);
        FpPoint h = scalar_mul(e, d2 / qb, g2); // order q^beta
        arith::Factorization qb_fact = arith::factor_u64(qb);

        bool found = false;
        for (unsigned tries = 0; tries < opts.sample_budget && !found; ++tries) {
            FpPoint r = random_point(e, rng);
            FpPoint rq = scalar_mul(e, n / (qa * qb), r); // q-primary projection
            // minimal k with q^k * rq inside <h>
            unsigned k = 0;
            std::optional<u64> t_log;
            FpPoint w = rq;
            for (; k <= alpha + beta; ++k) {
                t_log = dlog(e, h, qb, qb_fact, w);
                if (t_log) break;
                w = scalar_mul(e, q, w);
            }
            require(t_log.has_value(), "group_structure: q-projection escaped the q-part");
            if (k != alpha) continue; // not a maximal complement direction
            u64 qk = pp(q, k);
            if (*t_log % qk != 0) continue; // inconsistent sample
            FpPoint u = add(e, rq, negate(e, scalar_mul(e, *t_log / qk, h)));
            if (point_order(e, u, qa * qb, arith::factor_u64(qa * qb)) != qa) continue;
            // certify the intersection with <h> is trivial: q^j u stays
            // outside <h> for every j < alpha
            bool independent = true;
            FpPoint probe = u;
            for (unsigned j = 0; j < alpha; ++j) {
                if (dlog(e, h, qb, qb_fact, probe)) { independent = false; break; }
                probe = scalar_mul(e, q, probe);
            }
            if (!independent) continue;
            parts.push_back(u);
            part_orders.push_back(qa);
            found = true;
        }
        if (!found) return std::nullopt;
    }

    FpPoint g1 = FpPoint::infinity_point();
    for (const FpPoint& u : parts) g1 = add(e, g1, u);
    if (point_order(e, g1, n, s.n_factors) != d1) return std::nullopt;
    s.g1 = g1;

    require(s.d1 * s.d2 == s.n, "group_structure: d1*d2 != n");
    require(s.d2 % s.d1 == 0, "group_structure: d1 does not divide d2");
    require((e.p - 1) % s.d1 == 0, "group_structure: d1 does not divide p-1");
    return s;
}

// ---------------------------------------------------------------- coordinates

std::pair<u64, u64> coordinates(const CurveFp& e, const GroupStructure& s, const FpPoint& pt) {
    if (pt.infinity) return {0, 0};
    std::vector<arith::Congruence> is, js;
    for (const auto& [prime, exp] : s.n_factors.factors) {
        (void)exp;
        u64 q = prime.get_ui();
        unsigned alpha = 0, beta = 0;
        u64 t = s.d1;
        while (t % q == 0) { ++alpha; t /= q; }
        t = s.d2;
        while (t % q == 0) { ++beta; t /= q; }
        u64 qa = pp(q, alpha), qb = pp(q, beta);
        u64 u = s.n / (qa * qb);

        // scale P and the basis into the q-primary component;
        // P = I g1 + J g2 projects to uP = I h1 + J h2
        FpPoint h1 = scalar_mul(e, u, s.g1);
        FpPoint h2 = scalar_mul(e, u, s.g2);
        FpPoint target = scalar_mul(e, u, pt);

        // two-dimensional BSGS: baby over (a, b<steps), giant over b
        const u64 steps = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(qb)))) + 1;
        if (qa * steps > kBsgsTableCap)
            throw BsgsCapExceeded("coordinate BSGS table above cap at p=" + std::to_string(e.p));
        std::unordered_map<u64, std::pair<u64, u64>> baby;
        baby.reserve(qa * steps * 2);
        FpPoint row = FpPoint::infinity_point();
        for (u64 a = 0; a < qa; ++a) {
            FpPoint walk = row;
            for (u64 bb = 0; bb < steps; ++bb) {
                baby.emplace(pack(e, walk), std::make_pair(a, bb));
                walk = add(e, walk, h2);
            }
            row = add(e, row, h1);
        }
        FpPoint stride = negate(e, scalar_mul(e, steps, h2));
        bool solved = false;
        FpPoint w = target;
        for (u64 c = 0; c * steps < qb + steps && !solved; ++c) {
            auto it = baby.find(pack(e, w));
            if (it != baby.end()) {
                // a matching point pins both residues: a mod qa directly,
                // b mod qb as bb + c*steps
                u64 a = it->second.first % qa;
                u64 b = (it->second.second + c * steps) % qb;
                is.push_back({Int(static_cast<unsigned long>(a)),
                              Int(static_cast<unsigned long>(qa))});
                js.push_back({Int(static_cast<unsigned long>(b)),
                              Int(static_cast<unsigned long>(qb))});
                solved = true;
            }
            w = add(e, w, stride);
        }
        if (!solved)
            throw InternalError("coordinates: point outside the certified structure at p=" +
                                std::to_string(e.p));
    }

    u64 i = 0, j = 0;
    if (!is.empty()) {
        auto ci = arith::crt(is);
        auto cj = arith::crt(js);
        require(ci && cj, "coordinates: CRT residues conflict");
        i = ci->r.get_ui();
        j = cj->r.get_ui();
    }
    FpPoint check = add(e, scalar_mul(e, i, s.g1), scalar_mul(e, j, s.g2));
    if (!(check == pt))
        throw InternalError("coordinates: recombination mismatch at p=" + std::to_string(e.p));
    return {i, j};
}

// ---------------------------------------------------------------- membership

LocalMembership local_membership(const CurveFp& e, const GroupStructure& s,
                                 const FpPoint& target, std::span<const FpPoint> gens) {
    LocalMembership lm;
    lm.prime = e.p;
    lm.d1 = s.d1;
    lm.d2 = s.d2;
    lm.modulus = s.d2;
    lm.target_coords = coordinates(e, s, target);
    for (const FpPoint& g : gens) lm.gen_coords.push_back(coordinates(e, s, g));

    const std::size_t r = gens.size();
    arith::IntMat a(2, r);
    for (std::size_t k = 0; k < r; ++k) {
        a(0, k) = Int(static_cast<unsigned long>(lm.gen_coords[k].first));
        a(1, k) = Int(static_cast<unsigned long>(lm.gen_coords[k].second));
    }
    std::vector<Int> b{Int(static_cast<unsigned long>(lm.target_coords.first)),
                       Int(static_cast<unsigned long>(lm.target_coords.second))};
    std::vector<Int> mods{Int(static_cast<unsigned long>(s.d1)),
                          Int(static_cast<unsigned long>(s.d2))};

    auto sol = arith::solve_congruence_system(a, b, mods);
    if (!sol) {
        lm.solvable = false;
        return lm;
    }
    lm.solvable = true;
    lm.offset = std::move(sol->offset);
    lm.basis = std::move(sol->lattice);
    return lm;
}

bool member_by_closure(const CurveFp& e, const FpPoint& target, std::span<const FpPoint> gens) {
    std::vector<u64> seen{pack(e, FpPoint::infinity_point())};
    std::vector<FpPoint> frontier{FpPoint::infinity_point()};
    auto known = [&](u64 key) { return std::find(seen.begin(), seen.end(), key) != seen.end(); };
    while (!frontier.empty()) {
        std::vector<FpPoint> next;
        for (const FpPoint& pt : frontier)
            for (const FpPoint& g : gens)
                for (const FpPoint& step : {g, negate(e, g)}) {
                    FpPoint q = add(e, pt, step);
                    u64 key = pack(e, q);
                    if (!known(key)) {
                        seen.push_back(key);
                        next.push_back(q);
                    }
                }
        frontier = std::move(next);
    }
    return known(pack(e, target));
}

} // namespace lindep::ecfp
