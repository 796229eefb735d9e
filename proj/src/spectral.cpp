#include "bdtile/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bdtile {

SubstitutionMatrix substitution_matrix(const SubstitutionRule& r) {
    SubstitutionMatrix m;
    m.n = r.prototiles.size();
    m.a.assign(m.n, std::vector<BigInt>(m.n, BigInt(0)));
    for (std::size_t j = 0; j < m.n; ++j)
        for (const auto& c : r.children[j]) ++m.a[c.prototile_id][j];
    return m;
}

PrimitivityResult primitivity(const SubstitutionMatrix& m) {
    const std::size_t n = m.n;
    std::vector<std::vector<bool>> b(n, std::vector<bool>(n)), base = {};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b[i][j] = m.a[i][j] > 0;
    base = b;
    const int bound = static_cast<int>(n * n - 2 * n + 2);
    for (int power = 1; power <= std::max(bound, 1); ++power) {
        bool all = true;
        for (const auto& row : b)
            for (bool x : row) all = all && x;
        if (all) return {true, power};
        std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                if (b[i][k])
                    for (std::size_t j = 0; j < n; ++j)
                        if (base[k][j]) next[i][j] = true;
        b.swap(next);
    }
    return {false, std::nullopt};
}

namespace {

using BigMatrix = std::vector<std::vector<BigInt>>;

BigMatrix identity_matrix(std::size_t n) {
    BigMatrix m(n, std::vector<BigInt>(n, BigInt(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

BigMatrix multiply(const BigMatrix& a, const BigMatrix& b) {
    const std::size_t n = a.size();
    BigMatrix c(n, std::vector<BigInt>(n, BigInt(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

BigMatrix matrix_power(const BigMatrix& m, std::uint64_t k) {
    BigMatrix acc = identity_matrix(m.size()), base = m;
    while (k != 0) {
        if (k & 1u) acc = multiply(acc, base);
        base = multiply(base, base);
        k >>= 1u;
    }
    return acc;
}

CountVector apply(const BigMatrix& m, const CountVector& v) {
    CountVector out(m.size(), BigInt(0));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

}  // namespace

CountVector count_vector(const SubstitutionMatrix& m, const CountVector& seed, std::uint64_t k) {
    if (seed.size() != m.n) throw ValidationError("count vector size mismatch");
    return apply(matrix_power(m.a, k), seed);
}

std::vector<BigInt> count_difference_sequence(const SubstitutionMatrix& m,
                                              const std::vector<Rational>& volumes,
                                              const CountVector& p_vec, const CountVector& q_vec,
                                              std::uint64_t k_max) {
    if (p_vec.size() != m.n || q_vec.size() != m.n || volumes.size() != m.n)
        throw ValidationError("count vector size mismatch");
    Rational vol_p(0), vol_q(0);
    for (std::size_t i = 0; i < m.n; ++i) {
        vol_p += volumes[i] * Rational(p_vec[i]);
        vol_q += volumes[i] * Rational(q_vec[i]);
    }
    if (vol_p != vol_q)
        throw ValidationError("count difference requires patches of equal volume, got " +
                              format_rational(vol_p) + " vs " + format_rational(vol_q));

    std::vector<BigInt> diff(m.n);
    for (std::size_t i = 0; i < m.n; ++i) diff[i] = p_vec[i] - q_vec[i];
    std::vector<BigInt> out;
    out.reserve(k_max + 1);
    std::vector<BigInt> cur = diff;
    for (std::uint64_t k = 0; k <= k_max; ++k) {
        BigInt s(0);
        for (const auto& x : cur) s += x;
        out.push_back(abs(s));
        if (k < k_max) {
            std::vector<BigInt> next(m.n, BigInt(0));
            for (std::size_t i = 0; i < m.n; ++i)
                for (std::size_t j = 0; j < m.n; ++j) next[i] += m.a[i][j] * cur[j];
            cur.swap(next);
        }
    }
    return out;
}

std::string dichotomy_name(Dichotomy c) {
    switch (c) {
        case Dichotomy::UniformlySpread: return "uniformly-spread-regime";
        case Dichotomy::Critical: return "critical";
        case Dichotomy::Continuum: return "continuum-regime";
    }
    return "?";
}

const EigenvalueInfo& SpectralReport::lambda_t() const {
    if (!t_index) throw InternalError("report has no index t");
    return eigenvalues[static_cast<std::size_t>(*t_index) - 1];
}

std::optional<Rational> SpectralReport::lambda_t_abs_exact() const {
    if (!t_index) return std::nullopt;
    const auto& ev = lambda_t();
    if (!ev.exact) return std::nullopt;
    return *ev.exact >= 0 ? *ev.exact : -*ev.exact;
}

double SpectralReport::lambda_t_abs() const { return std::abs(lambda_t().approx); }

namespace {

// --- exact path -------------------------------------------------------------

// Monic characteristic polynomial coefficients c[0..n-1] with
// p(x) = x^n + c[n-1] x^(n-1) + ... + c[0], for n <= 3.
std::vector<BigInt> char_poly_small(const SubstitutionMatrix& m) {
    const auto& a = m.a;
    if (m.n == 1) return {-a[0][0]};
    if (m.n == 2) {
        const BigInt tr = a[0][0] + a[1][1];
        const BigInt det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        return {det, -tr};
    }
    const BigInt tr = a[0][0] + a[1][1] + a[2][2];
    const BigInt m2 = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) +
                      (a[0][0] * a[2][2] - a[0][2] * a[2][0]) +
                      (a[1][1] * a[2][2] - a[1][2] * a[2][1]);
    const BigInt det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    return {-det, m2, -tr};
}

BigInt eval_monic(const std::vector<BigInt>& c, const BigInt& x) {
    BigInt v(1);
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

// Divides the monic polynomial by (x - root); root must be a root.
std::vector<BigInt> deflate(const std::vector<BigInt>& c, const BigInt& root) {
    std::vector<BigInt> q(c.size() ? c.size() - 1 : 0);
    BigInt carry(1);
    for (std::size_t i = c.size(); i-- > 1;) {
        q[i - 1] = carry;
        carry = carry * root + c[i];
    }
    return q;
}

// All integer roots with multiplicity; empty optional when the polynomial
// does not split over Z (equivalently over Q, being monic with integer
// coefficients) or the constant term is too large to factor cheaply.
std::optional<std::vector<BigInt>> integer_roots(std::vector<BigInt> c) {
    std::vector<BigInt> roots;
    while (!c.empty()) {
        if (c[0] == 0) {
            roots.push_back(0);
            c = deflate(c, 0);
            continue;
        }
        const BigInt a0 = abs(c[0]);
        if (a0 > BigInt(1'000'000'000'000LL)) return std::nullopt;
        bool found = false;
        for (BigInt div(1); div * div <= a0 && !found; ++div) {
            if (a0 % div != 0) continue;
            for (const BigInt& base : {div, a0 / div}) {
                for (const BigInt& cand : {base, -base}) {
                    if (eval_monic(c, cand) == 0) {
                        roots.push_back(cand);
                        c = deflate(c, cand);
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
        }
        if (!found) return std::nullopt;
    }
    return roots;
}

// Rational nullspace basis of (M - lambda I); each vector has its first
// nonzero entry normalized to 1.
std::vector<std::vector<Rational>> rational_nullspace(const SubstitutionMatrix& m,
                                                      const Rational& lambda) {
    const std::size_t n = m.n;
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = Rational(m.a[i][j]);
            if (i == j) a[i][j] -= lambda;
        }
    std::vector<int> pivot_col_of_row(n, -1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t p = row;
        while (p < n && a[p][col] == 0) ++p;
        if (p == n) continue;
        std::swap(a[p], a[row]);
        const Rational inv = a[row][col];
        for (std::size_t j = col; j < n; ++j) a[row][j] /= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || a[i][col] == 0) continue;
            const Rational f = a[i][col];
            for (std::size_t j = col; j < n; ++j) a[i][j] -= f * a[row][j];
        }
        pivot_col_of_row[row] = static_cast<int>(col);
        ++row;
    }
    std::vector<bool> is_pivot(n, false);
    for (std::size_t i = 0; i < row; ++i) is_pivot[pivot_col_of_row[i]] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t freecol = 0; freecol < n; ++freecol) {
        if (is_pivot[freecol]) continue;
        std::vector<Rational> v(n, Rational(0));
        v[freecol] = 1;
        for (std::size_t i = 0; i < row; ++i) v[pivot_col_of_row[i]] = -a[i][freecol];
        // normalize first nonzero entry to 1
        for (const auto& entry : v) {
            if (entry != 0) {
                const Rational scale = entry;
                for (auto& e : v) e /= scale;
                break;
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

struct EigenGroup {
    int first_index = 0;  // 1-based position in the sorted eigenvalue list
    int algebraic = 0;
    std::optional<Rational> exact;  // real rational value
    std::complex<double> approx;
    std::vector<std::vector<Rational>> exact_basis;
    std::vector<Eigen::VectorXcd> numeric_basis;
    bool sum_nonzero = false;
    bool defective = false;
};

// --- shared -----------------------------------------------------------------

Rational exact_lambda1_from_volumes(const SubstitutionMatrix& m, const std::vector<Rational>& volumes) {
    if (volumes.size() != m.n) throw ValidationError("volume vector size mismatch");
    for (const auto& v : volumes)
        if (v <= 0) throw ValidationError("volumes must be positive");
    Rational lambda(0);
    for (std::size_t j = 0; j < m.n; ++j) {
        Rational s(0);
        for (std::size_t i = 0; i < m.n; ++i) s += Rational(m.a[i][j]) * volumes[i];
        const Rational ratio = s / volumes[j];
        if (j == 0) {
            lambda = ratio;
        } else if (ratio != lambda) {
            throw ValidationError("volume vector is not a left eigenvector of the matrix");
        }
    }
    return lambda;
}

}  // namespace

SpectralReport spectral_report(const SubstitutionMatrix& m, const std::vector<Rational>& volumes,
                               int dimension, double tolerance) {
    if (m.n == 0) throw ValidationError("empty matrix");
    if (dimension < 1) throw ValidationError("dimension must be positive");
    const PrimitivityResult prim = primitivity(m);
    if (!prim.is_primitive) throw ValidationError("matrix is not primitive");

    SpectralReport rep;
    rep.n = m.n;
    rep.tolerance = tolerance;
    rep.u1 = volumes;
    rep.lambda1_exact = exact_lambda1_from_volumes(m, volumes);

    std::vector<EigenGroup> groups;

    std::optional<std::vector<BigInt>> roots;
    if (m.n <= 3) roots = integer_roots(char_poly_small(m));

    if (roots) {
        rep.exact_path = true;
        // distinct values with multiplicity, sorted by |value| desc then value desc
        std::sort(roots->begin(), roots->end(), [](const BigInt& x, const BigInt& y) {
            const BigInt ax = abs(x), ay = abs(y);
            if (ax != ay) return ax > ay;
            return x > y;
        });
        int index = 1;
        for (std::size_t i = 0; i < roots->size();) {
            std::size_t j = i;
            while (j < roots->size() && (*roots)[j] == (*roots)[i]) ++j;
            EigenGroup g;
            g.first_index = index;
            g.algebraic = static_cast<int>(j - i);
            g.exact = Rational((*roots)[i]);
            g.approx = std::complex<double>(static_cast<double>((*roots)[i]), 0.0);
            g.exact_basis = rational_nullspace(m, *g.exact);
            g.defective = static_cast<int>(g.exact_basis.size()) < g.algebraic;
            for (const auto& v : g.exact_basis) {
                Rational s(0);
                for (const auto& e : v) s += e;
                if (s != 0) g.sum_nonzero = true;
            }
            groups.push_back(std::move(g));
            index += static_cast<int>(j - i);
            i = j;
        }
    } else {
        Eigen::MatrixXd num(m.n, m.n);
        for (std::size_t i = 0; i < m.n; ++i)
            for (std::size_t j = 0; j < m.n; ++j) num(i, j) = static_cast<double>(m.a[i][j]);
        Eigen::EigenSolver<Eigen::MatrixXd> solver(num);
        if (solver.info() != Eigen::Success) throw InternalError("eigenvalue solver failed");

        std::vector<std::complex<double>> vals(m.n);
        for (std::size_t i = 0; i < m.n; ++i) vals[i] = solver.eigenvalues()(static_cast<long>(i));
        std::sort(vals.begin(), vals.end(), [](const auto& x, const auto& y) {
            if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
            if (x.real() != y.real()) return x.real() > y.real();
            return x.imag() > y.imag();
        });
        const double scale = std::abs(vals.front());
        int index = 1;
        for (std::size_t i = 0; i < vals.size();) {
            std::size_t j = i;
            while (j < vals.size() && std::abs(vals[j] - vals[i]) <= tolerance * scale) ++j;
            EigenGroup g;
            g.first_index = index;
            g.algebraic = static_cast<int>(j - i);
            g.approx = vals[i];
            // numeric nullspace of (M - lambda I)
            Eigen::MatrixXcd shifted = num.cast<std::complex<double>>();
            for (std::size_t kk = 0; kk < m.n; ++kk) shifted(static_cast<long>(kk), static_cast<long>(kk)) -= vals[i];
            Eigen::FullPivLU<Eigen::MatrixXcd> lu(shifted);
            lu.setThreshold(tolerance * std::max(scale, 1.0));
            Eigen::MatrixXcd kernel = lu.kernel();
            for (long c = 0; c < kernel.cols(); ++c) {
                Eigen::VectorXcd v = kernel.col(c);
                // normalize first significant entry to 1
                for (long rr = 0; rr < v.size(); ++rr) {
                    if (std::abs(v(rr)) > tolerance * v.norm()) {
                        v /= v(rr);
                        break;
                    }
                }
                std::complex<double> s = v.sum();
                if (std::abs(s) > tolerance * v.norm()) g.sum_nonzero = true;
                g.numeric_basis.push_back(std::move(v));
            }
            g.defective = static_cast<int>(g.numeric_basis.size()) < g.algebraic;
            groups.push_back(std::move(g));
            index += static_cast<int>(j - i);
            i = j;
        }
    }

    // flatten into per-index eigenvalue/eigenvector lists
    for (const auto& g : groups) {
        for (int c = 0; c < g.algebraic; ++c) {
            EigenvalueInfo ev;
            ev.approx = g.approx;
            ev.exact = g.exact;
            rep.eigenvalues.push_back(ev);
            EigenvectorInfo vec;
            if (rep.exact_path) {
                if (static_cast<std::size_t>(c) < g.exact_basis.size()) {
                    vec.exact = g.exact_basis[c];
                    vec.approx.resize(m.n);
                    for (std::size_t i = 0; i < m.n; ++i)
                        vec.approx[i] = std::complex<double>(static_cast<double>(to_real((*vec.exact)[i])), 0.0);
                }
            } else if (static_cast<std::size_t>(c) < g.numeric_basis.size()) {
                vec.approx.resize(m.n);
                for (std::size_t i = 0; i < m.n; ++i) vec.approx[i] = g.numeric_basis[c](static_cast<long>(i));
            }
            rep.right_eigenvectors.push_back(std::move(vec));
        }
    }

    // sanity: dominant eigenvalue must match the exact PF value
    {
        const double lam1 = std::abs(rep.eigenvalues.front().approx);
        const double lam1_exact = static_cast<double>(to_real(rep.lambda1_exact));
        if (std::abs(lam1 - lam1_exact) > tolerance * std::max(1.0, lam1_exact))
            throw InternalError("dominant eigenvalue disagrees with the volume eigenvector value");
        if (rep.exact_path) rep.eigenvalues.front().exact = rep.lambda1_exact;
    }

    // index t: first group past lambda1 whose eigenspace leaves the
    // orthogonal complement of the all-ones vector
    for (const auto& g : groups) {
        if (g.first_index == 1) {
            continue;  // PF group
        }
        if (g.sum_nonzero) {
            if (g.defective)
                throw InternalError("defective eigenspace at index t (Jordan block); refusing to classify");
            rep.t_index = g.first_index;
            break;
        }
        if (g.defective)
            throw InternalError(
                "defective eigenspace inside the all-ones complement above index t; generalized "
                "eigenvectors may carry nonzero coordinate sum, refusing to guess t");
    }

    if (rep.t_index) {
        const double target = std::abs(rep.eigenvalues[static_cast<std::size_t>(*rep.t_index) - 1].approx);
        const double scale = std::abs(rep.eigenvalues.front().approx);
        for (std::size_t i = 1; i < rep.eigenvalues.size(); ++i) {
            if (std::abs(std::abs(rep.eigenvalues[i].approx) - target) <= tolerance * std::max(scale, 1.0))
                rep.t_modulus_indices.push_back(static_cast<int>(i + 1));
        }
    }

    // dichotomy: |lambda_t|^d versus lambda1^(d-1)
    if (!rep.t_index) {
        rep.classification = Dichotomy::UniformlySpread;
    } else if (auto abs_exact = rep.lambda_t_abs_exact()) {
        const Rational lhs = rational_pow(*abs_exact, static_cast<std::uint64_t>(dimension));
        const Rational rhs = rational_pow(rep.lambda1_exact, static_cast<std::uint64_t>(dimension - 1));
        rep.classification = lhs == rhs   ? Dichotomy::Critical
                             : lhs > rhs ? Dichotomy::Continuum
                                         : Dichotomy::UniformlySpread;
    } else {
        const Real lhs = pow(Real(rep.lambda_t_abs()), static_cast<int>(dimension));
        const Real rhs = pow(to_real(rep.lambda1_exact), static_cast<int>(dimension - 1));
        const Real band = Real(tolerance) * std::max(lhs, rhs) * dimension;
        if (abs(lhs - rhs) <= band)
            rep.classification = Dichotomy::Critical;
        else
            rep.classification = lhs > rhs ? Dichotomy::Continuum : Dichotomy::UniformlySpread;
    }
    return rep;
}

double estimate_c0(const SubstitutionMatrix& m, const SpectralReport& rep, const CountVector& p_vec,
                   const CountVector& q_vec) {
    if (!rep.t_index) throw ValidationError("c0 estimate requires an index t");
    const Real abs_t = rep.lambda_t_abs_exact() ? to_real(*rep.lambda_t_abs_exact())
                                                : Real(rep.lambda_t_abs());
    const std::uint64_t k0 = 10;
    CountVector diff(m.n);
    for (std::size_t i = 0; i < m.n; ++i) diff[i] = p_vec[i] - q_vec[i];
    CountVector cur = count_vector(m, diff, k0);
    Real best(-1);
    for (std::uint64_t k = k0; k <= k0 + m.n; ++k) {
        BigInt s(0);
        for (const auto& x : cur) s += x;
        const Real value = Real(abs(s)) / pow(abs_t, static_cast<int>(k));
        if (best < 0 || value < best) best = value;
        std::vector<BigInt> next(m.n, BigInt(0));
        for (std::size_t i = 0; i < m.n; ++i)
            for (std::size_t j = 0; j < m.n; ++j) next[i] += m.a[i][j] * cur[j];
        cur.swap(next);
    }
    return static_cast<double>(best);
}

}  // namespace bdtile
