#include "lindep/ec_rational.hpp"

#include <algorithm>

namespace lindep::ecq {

CurveQ::CurveQ(Int a_, Int b_) : a(std::move(a_)), b(std::move(b_)) {
    if (discriminant() == 0)
        throw InvalidInputError("curve y^2 = x^3 + " + a.get_str() + "x + " + b.get_str() +
                                " is singular");
}

Int CurveQ::discriminant() const { return -16 * (4 * a * a * a + 27 * b * b); }

PointQ PointQ::affine(Rat x, Rat y) {
    PointQ p;
    p.x = std::move(x);
    p.y = std::move(y);
    p.x.canonicalize();
    p.y.canonicalize();
    p.infinity = false;
    return p;
}

bool on_curve(const CurveQ& e, const PointQ& p) {
    if (p.infinity) return true;
    return p.y * p.y == p.x * p.x * p.x + Rat(e.a) * p.x + Rat(e.b);
}

PointQ negate(const PointQ& p) {
    if (p.infinity) return p;
    return PointQ::affine(p.x, -p.y);
}

PointQ add(const CurveQ& e, const PointQ& p, const PointQ& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    Rat lambda;
    if (p.x == q.x) {
        if (p.y == -q.y) return PointQ::infinity_point(); // includes the y = 0 case
        lambda = (3 * p.x * p.x + Rat(e.a)) / (2 * p.y);
    } else {
        lambda = (q.y - p.y) / (q.x - p.x);
    }
    Rat x3 = lambda * lambda - p.x - q.x;
    Rat y3 = lambda * (p.x - x3) - p.y;
    return PointQ::affine(x3, y3);
}

PointQ scalar_mul(const CurveQ& e, const Int& n, const PointQ& p) {
    if (n == 0 || p.infinity) return PointQ::infinity_point();
    Int k = abs(n);
    PointQ base = n < 0 ? negate(p) : p;
    PointQ acc = PointQ::infinity_point();
    for (long bit = mpz_sizeinbase(k.get_mpz_t(), 2) - 1; bit >= 0; --bit) {
        acc = add(e, acc, acc);
        if (mpz_tstbit(k.get_mpz_t(), bit)) acc = add(e, acc, base);
    }
    return acc;
}

PointQ linear_combination(const CurveQ& e, std::span<const Int> coeffs,
                          std::span<const PointQ> points) {
    require(coeffs.size() == points.size(), "linear_combination: length mismatch");
    PointQ acc = PointQ::infinity_point();
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        acc = add(e, acc, scalar_mul(e, coeffs[i], points[i]));
    return acc;
}

std::vector<std::uint64_t> good_primes(const CurveQ& e, std::uint64_t bound) {
    std::vector<std::uint64_t> out;
    const Int disc = e.discriminant();
    for (std::uint64_t p : arith::primes_up_to(bound)) {
        if (p == 2) continue;
        if (mpz_fdiv_ui(disc.get_mpz_t(), p) == 0) continue;
        out.push_back(p);
    }
    return out;
}

ecfp::CurveFp reduce_curve(const CurveQ& e, std::uint64_t prime) {
    std::uint64_t a = mpz_fdiv_ui(e.a.get_mpz_t(), prime);
    std::uint64_t b = mpz_fdiv_ui(e.b.get_mpz_t(), prime);
    return ecfp::CurveFp(prime, a, b);
}

ecfp::FpPoint reduce_point(const CurveQ&, const PointQ& p, std::uint64_t prime) {
    if (p.infinity) return ecfp::FpPoint::infinity_point();
    const Int& xd = p.x.get_den();
    const Int& yd = p.y.get_den();
    bool px = mpz_fdiv_ui(xd.get_mpz_t(), prime) == 0;
    bool py = mpz_fdiv_ui(yd.get_mpz_t(), prime) == 0;
    if (px || py) {
        // on a good-reduction curve p | den(x) iff p | den(y) (den(x) = u^2,
        // den(y) = u^3); the projective Z-coordinate vanishes mod p
        require(px && py, "reduce_point: inconsistent denominator valuations");
        return ecfp::FpPoint::infinity_point();
    }
    std::uint64_t xn = mpz_fdiv_ui(p.x.get_num().get_mpz_t(), prime);
    std::uint64_t yn = mpz_fdiv_ui(p.y.get_num().get_mpz_t(), prime);
    std::uint64_t xdm = mpz_fdiv_ui(xd.get_mpz_t(), prime);
    std::uint64_t ydm = mpz_fdiv_ui(yd.get_mpz_t(), prime);
    std::uint64_t x = arith::mul_mod(xn, arith::inv_mod(xdm, prime), prime);
    std::uint64_t y = arith::mul_mod(yn, arith::inv_mod(ydm, prime), prime);
    return ecfp::FpPoint::affine(x, y);
}

std::optional<unsigned> torsion_order(const CurveQ& e, const PointQ& p, unsigned max_order) {
    if (p.infinity) return 1;
    // torsion points on an integral model are integral, so a denominator
    // settles the question without touching the group law
    if (p.x.get_den() != 1 || p.y.get_den() != 1) return std::nullopt;
    PointQ acc = p;
    for (unsigned n = 2; n <= max_order; ++n) {
        acc = add(e, acc, p);
        if (acc.infinity) return n;
    }
    return std::nullopt;
}

namespace {

std::vector<Int> positive_divisors(const Int& n) {
    arith::Factorization f = arith::factor(abs(n));
    std::vector<Int> divs{1};
    for (const auto& [prime, exp] : f.factors) {
        std::size_t base = divs.size();
        Int pk = 1;
        for (unsigned k = 1; k <= exp; ++k) {
            pk *= prime;
            for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

// integer roots of x^3 + a x + c
std::vector<Int> integer_cubic_roots(const Int& a, const Int& c) {
    std::vector<Int> roots;
    auto is_root = [&](const Int& x) { return x * x * x + a * x + c == 0; };
    if (c == 0) {
        roots.push_back(0);
        // x^2 = -a
        if (a < 0) {
            Int s = sqrt(Int(-a));
            if (s * s == -a) {
                roots.push_back(s);
                if (s != 0) roots.push_back(-s);
            }
        }
    } else {
        for (const Int& d : positive_divisors(c)) {
            if (is_root(d)) roots.push_back(d);
            if (is_root(-d)) roots.push_back(-d);
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

bool point_less(const PointQ& a, const PointQ& b) {
    if (a.infinity != b.infinity) return a.infinity;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

} // namespace

TorsionGroup torsion_subgroup(const CurveQ& e) {
    // Lutz-Nagell: rational torsion points are integral with y = 0 or y^2 | disc
    TorsionGroup t;
    t.points.push_back(PointQ::infinity_point());

    std::vector<Int> ys{0};
    const Int disc = abs(e.discriminant());
    for (const Int& y : positive_divisors(disc))
        if (disc % (y * y) == 0) ys.push_back(y);

    for (const Int& y : ys) {
        for (const Int& x : integer_cubic_roots(e.a, e.b - y * y)) {
            PointQ p = PointQ::affine(Rat(x), Rat(y));
            if (!on_curve(e, p)) continue;
            if (!torsion_order(e, p)) continue;
            t.points.push_back(p);
            if (y != 0) t.points.push_back(negate(p));
        }
    }
    std::sort(t.points.begin(), t.points.end(), point_less);
    t.points.erase(std::unique(t.points.begin(), t.points.end()), t.points.end());
    t.order = static_cast<unsigned>(t.points.size());
    require(t.order <= 16, "torsion subgroup larger than the Mazur bound");
    return t;
}

} // namespace lindep::ecq
