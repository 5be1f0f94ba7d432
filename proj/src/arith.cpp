#include "lindep/arith.hpp"

#include <algorithm>
#include <random>

namespace lindep::arith {

// ---------------------------------------------------------------- rng

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt, std::uint64_t stream) {
    return mix64(base ^ mix64(salt ^ mix64(stream)));
}

// ---------------------------------------------------------------- u64 modular helpers

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m) {
    // extended Euclid on signed 128-bit accumulators
    __int128 t = 0, nt = 1;
    __int128 r = m, nr = a % m;
    while (nr != 0) {
        __int128 q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (r != 1) throw InternalError("inv_mod: argument not invertible");
    if (t < 0) t += m;
    return static_cast<std::uint64_t>(t);
}

int legendre(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    std::uint64_t s = pow_mod(a, (p - 1) / 2, p);
    return s == 1 ? 1 : -1;
}

std::optional<std::uint64_t> sqrt_mod(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    if (p == 2) return a;
    if (legendre(a, p) != 1) return std::nullopt;
    if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);

    // Tonelli-Shanks
    std::uint64_t q = p - 1, s = 0;
    while ((q & 1) == 0) { q >>= 1; ++s; }
    std::uint64_t z = 2;
    while (legendre(z, p) != -1) ++z;
    std::uint64_t m = s;
    std::uint64_t c = pow_mod(z, q, p);
    std::uint64_t t = pow_mod(a, q, p);
    std::uint64_t r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        std::uint64_t i = 0, tt = t;
        while (tt != 1) { tt = mul_mod(tt, tt, p); ++i; }
        std::uint64_t b = c;
        for (std::uint64_t k = 0; k + i + 1 < m; ++k) b = mul_mod(b, b, p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    return r;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
    std::vector<std::uint64_t> out;
    if (bound < 2) return out;
    std::vector<bool> comp(bound + 1, false);
    for (std::uint64_t i = 2; i * i <= bound; ++i)
        if (!comp[i])
            for (std::uint64_t j = i * i; j <= bound; j += i) comp[j] = true;
    for (std::uint64_t i = 2; i <= bound; ++i)
        if (!comp[i]) out.push_back(i);
    return out;
}

// ---------------------------------------------------------------- primality

namespace {

// one Miller-Rabin round; true = "probably prime with respect to this base"
bool mr_round(const Int& n, const Int& d, unsigned long s, const Int& base) {
    Int a = base % n;
    if (a == 0) return true;
    Int x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = (x * x) % n;
        if (x == n - 1) return true;
    }
    return false;
}

} // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // deterministic below 2^64 with the first twelve primes as bases
    for (std::uint64_t b : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        std::uint64_t x = pow_mod(b, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (unsigned i = 1; i < s && witness; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) witness = false;
        }
        if (witness) return false;
    }
    return true;
}

bool is_prime(const Int& n, std::uint64_t seed) {
    if (n < 2) return false;
    if (n.fits_ulong_p()) return is_prime_u64(n.get_ui());
    for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul, 29ul, 31ul, 37ul})
        if (n % p == 0) return false;
    Int d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;

    static const Int two64 = Int(1) << 64;
    if (n < two64) {
        // deterministic for n < 2^64 with the first twelve primes as bases
        for (unsigned long b : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul, 29ul, 31ul, 37ul})
            if (!mr_round(n, d, s, Int(b))) return false;
        return true;
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 64; ++i) {
        Int base = 2 + Int(rng()) % (n - 3);
        if (!mr_round(n, d, s, base)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- factoring

unsigned Factorization::exponent_of(const Int& prime) const {
    for (const auto& [p, e] : factors)
        if (p == prime) return e;
    return 0;
}

namespace {

Int pollard_rho_split(const Int& n, const FactorOptions& opts, std::mt19937_64& rng) {
    // Brent's cycle detection on x -> x^2 + c mod n. Returns a nontrivial
    // factor or throws after the attempt budget.
    for (unsigned attempt = 0; attempt < opts.rho_attempts; ++attempt) {
        Int c = 1 + Int(rng()) % (n - 1);
        Int y = 1 + Int(rng()) % (n - 1);
        Int g = 1, q = 1, x = 0, ys = 0;
        std::uint64_t r = 1, iterations = 0;
        const unsigned batch = 128;
        while (g == 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = (y * y + c) % n;
            for (std::uint64_t k = 0; k < r && g == 1; k += batch) {
                ys = y;
                for (std::uint64_t i = 0; i < std::min<std::uint64_t>(batch, r - k); ++i) {
                    y = (y * y + c) % n;
                    q = q * abs(x - y) % n;
                }
                g = gcd(q, n);
                iterations += batch;
                if (iterations > opts.rho_iteration_cap) { g = n; break; }
            }
            r *= 2;
        }
        if (g == n) {
            // backtrack, or a genuine cycle failure -> retry with new c
            g = 1;
            while (g == 1 && iterations <= opts.rho_iteration_cap) {
                ys = (ys * ys + c) % n;
                g = gcd(abs(x - ys), n);
                ++iterations;
            }
        }
        if (g != 1 && g != n) return g;
    }
    throw BudgetError("factor: Pollard rho attempt budget exhausted for " + Int(n).get_str());
}

void factor_rec(const Int& n, const FactorOptions& opts, std::mt19937_64& rng,
                std::vector<Int>& primes_out) {
    if (n == 1) return;
    if (is_prime(n)) {
        primes_out.push_back(n);
        return;
    }
    Int d = pollard_rho_split(n, opts, rng);
    factor_rec(d, opts, rng, primes_out);
    factor_rec(n / d, opts, rng, primes_out);
}

const std::vector<std::uint64_t>& small_primes_10000() {
    static const std::vector<std::uint64_t> table = primes_up_to(10'000);
    return table;
}

} // namespace

Factorization factor(const Int& n, const FactorOptions& opts) {
    if (n < 1) throw InvalidInputError("factor: argument must be >= 1");
    if (n.fits_ulong_p()) return factor_u64(n.get_ui(), opts);
    Factorization f;
    f.value = n;
    Int rest = n;

    std::vector<Int> primes;
    const auto& table = opts.trial_bound == 10'000 ? small_primes_10000() : primes_up_to(opts.trial_bound);
    for (std::uint64_t q : table) {
        if (rest == 1) break;
        if (Int(q) * q > rest) break;
        while (rest % q == 0) {
            primes.push_back(Int(q));
            rest /= q;
        }
    }
    if (rest > 1) {
        if (is_prime(rest)) {
            primes.push_back(rest);
        } else {
            std::mt19937_64 rng(derive_seed(opts.seed, mpz_fdiv_ui(n.get_mpz_t(), 0xffffffffULL)));
            factor_rec(rest, opts, rng, primes);
        }
    }
    std::sort(primes.begin(), primes.end());
    for (const Int& p : primes) {
        if (!f.factors.empty() && f.factors.back().first == p)
            ++f.factors.back().second;
        else
            f.factors.emplace_back(p, 1);
    }
    return f;
}

namespace {

std::uint64_t rho_split_u64(std::uint64_t n, const FactorOptions& opts, std::mt19937_64& rng) {
    for (unsigned attempt = 0; attempt < opts.rho_attempts; ++attempt) {
        std::uint64_t c = 1 + rng() % (n - 1);
        std::uint64_t y = 1 + rng() % (n - 1);
        std::uint64_t g = 1, q = 1, x = 0, ys = 0;
        std::uint64_t r = 1, iterations = 0;
        const unsigned batch = 128;
        auto step = [&](std::uint64_t v) { return (mul_mod(v, v, n) + c) % n; };
        while (g == 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = step(y);
            for (std::uint64_t k = 0; k < r && g == 1; k += batch) {
                ys = y;
                for (std::uint64_t i = 0; i < std::min<std::uint64_t>(batch, r - k); ++i) {
                    y = step(y);
                    q = mul_mod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                iterations += batch;
                if (iterations > opts.rho_iteration_cap) { g = n; break; }
            }
            r *= 2;
        }
        if (g == n) {
            g = 1;
            while (g == 1 && iterations <= opts.rho_iteration_cap) {
                ys = step(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
                ++iterations;
            }
        }
        if (g != 1 && g != n) return g;
    }
    throw BudgetError("factor: Pollard rho attempt budget exhausted for " + std::to_string(n));
}

void factor_rec_u64(std::uint64_t n, const FactorOptions& opts, std::mt19937_64& rng,
                    std::vector<std::uint64_t>& primes_out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        primes_out.push_back(n);
        return;
    }
    std::uint64_t d = rho_split_u64(n, opts, rng);
    factor_rec_u64(d, opts, rng, primes_out);
    factor_rec_u64(n / d, opts, rng, primes_out);
}

} // namespace

Factorization factor_u64(std::uint64_t n, const FactorOptions& opts) {
    if (n < 1) throw InvalidInputError("factor: argument must be >= 1");
    Factorization f;
    f.value = Int(static_cast<unsigned long>(n));
    std::uint64_t rest = n;

    std::vector<std::uint64_t> primes;
    const auto& table =
        opts.trial_bound == 10'000 ? small_primes_10000() : primes_up_to(opts.trial_bound);
    for (std::uint64_t q : table) {
        if (rest == 1 || q * q > rest) break;
        while (rest % q == 0) {
            primes.push_back(q);
            rest /= q;
        }
    }
    if (rest > 1) {
        if (is_prime_u64(rest)) {
            primes.push_back(rest);
        } else {
            std::mt19937_64 rng(derive_seed(opts.seed, n));
            factor_rec_u64(rest, opts, rng, primes);
        }
    }
    std::sort(primes.begin(), primes.end());
    for (std::uint64_t p : primes) {
        Int pi(static_cast<unsigned long>(p));
        if (!f.factors.empty() && f.factors.back().first == pi)
            ++f.factors.back().second;
        else
            f.factors.emplace_back(pi, 1);
    }
    return f;
}

// ---------------------------------------------------------------- CRT

std::optional<Congruence> crt(std::span<const Congruence> parts) {
    if (parts.empty()) throw InvalidInputError("crt: empty congruence list");
    Int r = parts[0].r % parts[0].m;
    if (r < 0) r += parts[0].m;
    Int m = parts[0].m;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const Int& r2 = parts[i].r;
        const Int& m2 = parts[i].m;
        Int g = gcd(m, m2);
        Int diff = r2 - r;
        if (diff % g != 0) return std::nullopt;
        Int m2g = m2 / g;
        Int k = (diff / g) % m2g;
        Int inv;
        Int mg = (m / g) % m2g;
        if (mpz_invert(inv.get_mpz_t(), mg.get_mpz_t(), m2g.get_mpz_t()) == 0)
            throw InternalError("crt: inverse must exist after gcd split");
        k = (k * inv) % m2g;
        Int lcm_m = m / g * m2;
        r = r + m * k;
        m = lcm_m;
        r %= m;
        if (r < 0) r += m;
    }
    return Congruence{r, m};
}

// ---------------------------------------------------------------- IntMat

IntMat IntMat::identity(std::size_t n) {
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

void IntMat::swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
}

void IntMat::swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < rows_; ++k) std::swap((*this)(k, i), (*this)(k, j));
}

void IntMat::add_row(std::size_t i, std::size_t j, const Int& c) {
    for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) += c * (*this)(j, k);
}

void IntMat::add_col(std::size_t i, std::size_t j, const Int& c) {
    for (std::size_t k = 0; k < rows_; ++k) (*this)(k, i) += c * (*this)(k, j);
}

void IntMat::negate_row(std::size_t i) {
    for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) = -(*this)(i, k);
}

void IntMat::negate_col(std::size_t i) {
    for (std::size_t k = 0; k < rows_; ++k) (*this)(k, i) = -(*this)(k, i);
}

IntMat IntMat::transposed() const {
    IntMat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

IntMat mat_mul(const IntMat& a, const IntMat& b) {
    require(a.cols() == b.rows(), "mat_mul dimension mismatch");
    IntMat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

std::vector<Int> mat_vec(const IntMat& a, std::span<const Int> v) {
    require(a.cols() == v.size(), "mat_vec dimension mismatch");
    std::vector<Int> out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
    return out;
}

Int det(const IntMat& m) {
    require(m.rows() == m.cols(), "det: matrix must be square");
    std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMat a = m; // Bareiss fraction-free elimination
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t piv = k + 1;
            while (piv < n && a(piv, k) == 0) ++piv;
            if (piv == n) return 0;
            a.swap_rows(k, piv);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int num = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                require(num % prev == 0, "Bareiss divisibility");
                a(i, j) = num / prev;
            }
        prev = a(k, k);
    }
    return sign > 0 ? a(n - 1, n - 1) : -a(n - 1, n - 1);
}

// ---------------------------------------------------------------- SNF

std::size_t SnfDecomposition::rank() const {
    std::size_t r = 0;
    std::size_t k = std::min(d.rows(), d.cols());
    for (std::size_t i = 0; i < k; ++i)
        if (d(i, i) != 0) ++r;
    return r;
}

namespace {

bool snf_pivot_clean(const IntMat& d, std::size_t t) {
    for (std::size_t i = t + 1; i < d.rows(); ++i)
        if (d(i, t) != 0) return false;
    for (std::size_t j = t + 1; j < d.cols(); ++j)
        if (d(t, j) != 0) return false;
    return true;
}

// smallest nonzero |entry| in the trailing submatrix; false if all zero
bool snf_find_pivot(const IntMat& d, std::size_t t, std::size_t& pi, std::size_t& pj) {
    bool found = false;
    Int best;
    for (std::size_t i = t; i < d.rows(); ++i)
        for (std::size_t j = t; j < d.cols(); ++j) {
            if (d(i, j) == 0) continue;
            Int v = abs(d(i, j));
            if (!found || v < best) {
                found = true;
                best = v;
                pi = i;
                pj = j;
            }
        }
    return found;
}

} // namespace

SnfDecomposition smith_normal_form(const IntMat& m) {
    SnfDecomposition s;
    s.original = m;
    s.d = m;
    s.u = IntMat::identity(m.rows());
    s.v = IntMat::identity(m.cols());
    IntMat& d = s.d;

    std::size_t k = std::min(m.rows(), m.cols());
    for (std::size_t t = 0; t < k; ++t) {
        std::size_t pi = t, pj = t;
        if (!snf_find_pivot(d, t, pi, pj)) break; // trailing block is zero
        d.swap_rows(t, pi);
        s.u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        s.v.swap_cols(t, pj);

        while (!snf_pivot_clean(d, t)) {
            // clear the pivot column, then the pivot row
            for (std::size_t i = t + 1; i < d.rows(); ++i) {
                if (d(i, t) == 0) continue;
                Int q = d(i, t) / d(t, t); // floor toward zero is fine: remainder shrinks
                d.add_row(i, t, -q);
                s.u.add_row(i, t, -q);
                if (d(i, t) != 0) { // remainder became the new, smaller pivot
                    d.swap_rows(t, i);
                    s.u.swap_rows(t, i);
                }
            }
            for (std::size_t j = t + 1; j < d.cols(); ++j) {
                if (d(t, j) == 0) continue;
                Int q = d(t, j) / d(t, t);
                d.add_col(j, t, -q);
                s.v.add_col(j, t, -q);
                if (d(t, j) != 0) {
                    d.swap_cols(t, j);
                    s.v.swap_cols(t, j);
                }
            }
        }
        if (d(t, t) < 0) {
            d.negate_row(t);
            s.u.negate_row(t);
        }
    }

    // enforce the divisibility chain d_i | d_{i+1}
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i + 1 < k; ++i) {
            if (d(i + 1, i + 1) == 0 || d(i, i) == 0) {
                if (d(i, i) == 0 && d(i + 1, i + 1) != 0) {
                    d.swap_rows(i, i + 1);
                    s.u.swap_rows(i, i + 1);
                    d.swap_cols(i, i + 1);
                    s.v.swap_cols(i, i + 1);
                    changed = true;
                }
                continue;
            }
            if (d(i + 1, i + 1) % d(i, i) == 0) continue;
            // fold d[i+1] into position i and re-reduce the 2x2 block
            d.add_col(i, i + 1, 1);
            s.v.add_col(i, i + 1, 1);
            while (!snf_pivot_clean(d, i)) {
                std::size_t pi = i, pj = i;
                snf_find_pivot(d, i, pi, pj);
                d.swap_rows(i, pi);
                s.u.swap_rows(i, pi);
                d.swap_cols(i, pj);
                s.v.swap_cols(i, pj);
                for (std::size_t r2 = i + 1; r2 < d.rows(); ++r2) {
                    if (d(r2, i) == 0) continue;
                    Int q = d(r2, i) / d(i, i);
                    d.add_row(r2, i, -q);
                    s.u.add_row(r2, i, -q);
                    if (d(r2, i) != 0) { d.swap_rows(i, r2); s.u.swap_rows(i, r2); }
                }
                for (std::size_t c2 = i + 1; c2 < d.cols(); ++c2) {
                    if (d(i, c2) == 0) continue;
                    Int q = d(i, c2) / d(i, i);
                    d.add_col(c2, i, -q);
                    s.v.add_col(c2, i, -q);
                    if (d(i, c2) != 0) { d.swap_cols(i, c2); s.v.swap_cols(i, c2); }
                }
            }
            if (d(i, i) < 0) { d.negate_row(i); s.u.negate_row(i); }
            changed = true;
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        if (d(i, i) < 0) {
            d.negate_row(i);
            s.u.negate_row(i);
        }
    return s;
}

// ---------------------------------------------------------------- HNF

IntMat hermite_normal_form(const IntMat& gens) {
    const std::size_t r = gens.rows();
    IntMat w = gens; // column operations only
    std::size_t cols = w.cols();

    for (std::size_t t = 0; t < r; ++t) {
        require(t < cols, "hermite_normal_form: input does not have full row rank");
        // gcd-reduce row t across columns >= t
        while (true) {
            std::size_t piv = cols;
            for (std::size_t j = t; j < cols; ++j) {
                if (w(t, j) == 0) continue;
                if (piv == cols || abs(w(t, j)) < abs(w(t, piv))) piv = j;
            }
            require(piv != cols, "hermite_normal_form: rank deficiency");
            w.swap_cols(t, piv);
            bool done = true;
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (w(t, j) == 0) continue;
                Int q = w(t, j) / w(t, t);
                w.add_col(j, t, -q);
                if (w(t, j) != 0) done = false;
            }
            if (done) break;
        }
        if (w(t, t) < 0) w.negate_col(t);
    }

    IntMat h(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) h(i, j) = w(i, j);

    // canonical off-diagonal reduction: 0 <= h(i, j) < h(i, i) for j < i
    for (std::size_t i = 0; i < r; ++i) {
        require(h(i, i) > 0, "hermite_normal_form: zero pivot");
        for (std::size_t j = 0; j < i; ++j) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), h(i, j).get_mpz_t(), h(i, i).get_mpz_t());
            if (q != 0) h.add_col(j, i, -q);
        }
    }
    return h;
}

// ---------------------------------------------------------------- systems over Z

std::optional<DiophantineSolution> solve_diophantine(const IntMat& a, std::span<const Int> b) {
    require(a.rows() == b.size(), "solve_diophantine: rhs length mismatch");
    SnfDecomposition s = smith_normal_form(a);
    const std::size_t rows = a.rows(), cols = a.cols();
    const std::size_t rank = s.rank();

    std::vector<Int> ub = mat_vec(s.u, b);
    std::vector<Int> w(cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (i < rank) {
            if (ub[i] % s.d(i, i) != 0) return std::nullopt;
            w[i] = ub[i] / s.d(i, i);
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }

    DiophantineSolution out;
    out.particular = mat_vec(s.v, w);
    out.kernel = IntMat(cols, cols - rank);
    for (std::size_t j = rank; j < cols; ++j)
        for (std::size_t i = 0; i < cols; ++i) out.kernel(i, j - rank) = s.v(i, j);
    return out;
}

std::optional<AffineSolutionSet> solve_congruence_system(const IntMat& a,
                                                         std::span<const Int> b,
                                                         std::span<const Int> m) {
    const std::size_t k = a.rows(), r = a.cols();
    require(b.size() == k && m.size() == k, "solve_congruence_system: shape mismatch");
    for (const Int& mod : m) require(mod > 0, "solve_congruence_system: nonpositive modulus");

    if (r == 0) {
        for (std::size_t i = 0; i < k; ++i)
            if (b[i] % m[i] != 0) return std::nullopt;
        return AffineSolutionSet{{}, IntMat(0, 0)};
    }

    // homogenize: [A | diag(m)] (c, y) = b over Z
    IntMat big(k, r + k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < r; ++j) big(i, j) = a(i, j);
        big(i, r + i) = m[i];
    }
    auto sol = solve_diophantine(big, b);
    if (!sol) return std::nullopt;

    AffineSolutionSet out;
    out.offset.assign(sol->particular.begin(), sol->particular.begin() + r);

    // project the kernel onto the c-coordinates; the span always contains
    // lcm(m) Z^r, so it has full rank r
    IntMat proj(r, sol->kernel.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < sol->kernel.cols(); ++j) proj(i, j) = sol->kernel(i, j);
    out.lattice = hermite_normal_form(proj);

    // canonical offset: reduce into the HNF box
    for (std::size_t i = 0; i < r; ++i) {
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), out.offset[i].get_mpz_t(), out.lattice(i, i).get_mpz_t());
        if (q == 0) continue;
        for (std::size_t i2 = i; i2 < r; ++i2) out.offset[i2] -= q * out.lattice(i2, i);
    }
    return out;
}

} // namespace lindep::arith
