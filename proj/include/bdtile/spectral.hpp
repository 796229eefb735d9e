#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdtile/substitution.hpp"

namespace bdtile {

using CountVector = std::vector<BigInt>;

// Entry (i, j) counts type-i tiles among the children of prototile j.
struct SubstitutionMatrix {
    std::size_t n = 0;
    std::vector<std::vector<BigInt>> a;  // row major

    const BigInt& at(std::size_t i, std::size_t j) const { return a[i][j]; }
};

SubstitutionMatrix substitution_matrix(const SubstitutionRule& r);

struct PrimitivityResult {
    bool is_primitive = false;
    std::optional<int> witness_power;  // first all-positive power
};

// Tests powers up to the Wielandt bound n^2 - 2n + 2.
PrimitivityResult primitivity(const SubstitutionMatrix& m);

CountVector count_vector(const SubstitutionMatrix& m, const CountVector& seed, std::uint64_t k);

// Entry k is |<1, M^k (p - q)>| for k = 0..k_max. Requires <u1, p> = <u1, q>.
std::vector<BigInt> count_difference_sequence(const SubstitutionMatrix& m,
                                              const std::vector<Rational>& volumes,
                                              const CountVector& p_vec, const CountVector& q_vec,
                                              std::uint64_t k_max);

enum class Dichotomy { UniformlySpread, Critical, Continuum };

std::string dichotomy_name(Dichotomy c);

struct EigenvalueInfo {
    std::complex<double> approx;
    std::optional<Rational> exact;  // set on the exact rational path
};

struct EigenvectorInfo {
    std::vector<std::complex<double>> approx;
    std::optional<std::vector<Rational>> exact;  // first nonzero entry = 1
};

struct SpectralReport {
    std::size_t n = 0;
    bool exact_path = false;
    double tolerance = 1e-9;
    std::vector<EigenvalueInfo> eigenvalues;          // strictly decreasing modulus, fixed tie-break
    std::vector<EigenvectorInfo> right_eigenvectors;  // matching order
    std::vector<Rational> u1;                         // left PF vector; entry i is vol(T_i)
    Rational lambda1_exact;                           // PF eigenvalue (always rational here)
    std::optional<int> t_index;                       // 1-based position, >= 2
    std::vector<int> t_modulus_indices;               // all indices sharing |lambda_t|
    Dichotomy classification = Dichotomy::UniformlySpread;
    std::optional<double> c0_estimate;

    const EigenvalueInfo& lambda_t() const;
    // |lambda_t| when t exists; exact if the eigenvalue is rational.
    std::optional<Rational> lambda_t_abs_exact() const;
    double lambda_t_abs() const;
};

// Eigen-data, the index t, and the dichotomy class for a rule in R^dimension.
// Exact rational shortcut when the characteristic polynomial splits over Q
// for n <= 3. Throws ValidationError on non-primitive input or
// volume-inconsistent data, and InternalError when a defective eigenspace
// blocks the determination of t.
SpectralReport spectral_report(const SubstitutionMatrix& m, const std::vector<Rational>& volumes,
                               int dimension, double tolerance = 1e-9);

// Lower-bound constant estimate: min over k in [10, 10+n] of
// |<1, M^k (p-q)>| / |lambda_t|^k. Requires t.
double estimate_c0(const SubstitutionMatrix& m, const SpectralReport& rep, const CountVector& p_vec,
                   const CountVector& q_vec);

}  // namespace bdtile
