#include "lindep/coset.hpp"

#include <algorithm>

namespace lindep::coset {

using arith::IntMat;

namespace {

// reduce v into the canonical box of the column-HNF basis: 0 <= v[i] < h(i,i)
void reduce_offset(std::vector<Int>& v, const IntMat& h) {
    const std::size_t r = v.size();
    for (std::size_t i = 0; i < r; ++i) {
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), v[i].get_mpz_t(), h(i, i).get_mpz_t());
        if (q == 0) continue;
        for (std::size_t k = i; k < r; ++k) v[k] -= q * h(k, i);
    }
}

} // namespace

CosetConstraint CosetConstraint::universe(std::size_t r) {
    CosetConstraint c;
    c.dim = r;
    c.offset.assign(r, Int(0));
    c.basis = IntMat::identity(r);
    return c;
}

bool CosetConstraint::operator==(const CosetConstraint& o) const {
    return dim == o.dim && offset == o.offset && basis == o.basis;
}

bool CosetConstraint::contains(std::span<const Int> v) const {
    require(v.size() == dim, "CosetConstraint::contains: dimension mismatch");
    // solve basis * x = v - offset by forward substitution (lower triangular)
    std::vector<Int> rem(v.begin(), v.end());
    for (std::size_t i = 0; i < dim; ++i) rem[i] -= offset[i];
    for (std::size_t i = 0; i < dim; ++i) {
        if (rem[i] % basis(i, i) != 0) return false;
        Int x = rem[i] / basis(i, i);
        for (std::size_t k = i; k < dim; ++k) rem[k] -= x * basis(k, i);
    }
    return true;
}

std::optional<CosetConstraint> absorb(const CosetConstraint& c,
                                      const ecfp::LocalMembership& local) {
    require(local.solvable, "absorb: local system must be solvable");
    require(local.offset.size() == c.dim, "absorb: dimension mismatch");
    const std::size_t r = c.dim;

    if (r == 0) {
        CosetConstraint out = c;
        out.source_primes.push_back(local.prime);
        std::sort(out.source_primes.begin(), out.source_primes.end());
        return out;
    }

    // (t1 + L1) n (t2 + L2): solve L1 x - L2 y = t2 - t1 over Z
    IntMat stacked(r, 2 * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            stacked(i, j) = c.basis(i, j);
            stacked(i, r + j) = -local.basis(i, j);
        }
    std::vector<Int> rhs(r);
    for (std::size_t i = 0; i < r; ++i) rhs[i] = local.offset[i] - c.offset[i];

    auto sol = arith::solve_diophantine(stacked, rhs);
    if (!sol) return std::nullopt; // empty intersection

    CosetConstraint out;
    out.dim = r;
    out.offset.assign(r, Int(0));
    for (std::size_t i = 0; i < r; ++i) {
        out.offset[i] = c.offset[i];
        for (std::size_t j = 0; j < r; ++j) out.offset[i] += c.basis(i, j) * sol->particular[j];
    }

    // intersection lattice = L1 * (x-part of the kernel)
    IntMat kx(r, sol->kernel.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < sol->kernel.cols(); ++j) kx(i, j) = sol->kernel(i, j);
    out.basis = arith::hermite_normal_form(arith::mat_mul(c.basis, kx));
    reduce_offset(out.offset, out.basis);

    out.source_primes = c.source_primes;
    out.source_primes.push_back(local.prime);
    std::sort(out.source_primes.begin(), out.source_primes.end());
    out.source_primes.erase(std::unique(out.source_primes.begin(), out.source_primes.end()),
                            out.source_primes.end());
    return out;
}

namespace {

std::optional<Candidate> symmetric_representative(std::vector<Int> v, const IntMat& h,
                                                  const Int& bound) {
    const std::size_t r = v.size();
    for (std::size_t i = 0; i < r; ++i) {
        const Int& d = h(i, i);
        Int m = v[i] % d;
        if (m < 0) m += d;
        if (2 * m > d) m -= d; // symmetric range (-d/2, d/2]
        Int q = (v[i] - m) / d;
        if (q != 0)
            for (std::size_t k = i; k < r; ++k) v[k] -= q * h(k, i);
    }
    for (const Int& x : v)
        if (abs(x) > bound) return std::nullopt;
    return Candidate{std::move(v)};
}

} // namespace

std::optional<Candidate> candidate(const CosetConstraint& c, const Int& bound) {
    return symmetric_representative(c.offset, c.basis, bound);
}

std::optional<Candidate> scaled_candidate(const CosetConstraint& c, const Int& a,
                                          const Int& bound) {
    std::vector<Int> v = c.offset;
    for (Int& x : v) x *= a;
    return symmetric_representative(std::move(v), c.basis, bound);
}

bool is_stable(std::span<const std::optional<Candidate>> history, std::size_t window) {
    if (window == 0 || history.size() < window) return false;
    const auto& last = history.back();
    if (!last) return false;
    for (std::size_t k = history.size() - window; k < history.size(); ++k)
        if (!history[k] || !(*history[k] == *last)) return false;
    return true;
}

} // namespace lindep::coset
