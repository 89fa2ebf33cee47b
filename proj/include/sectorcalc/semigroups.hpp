#pragma once

#include <cstddef>
#include <vector>

#include "sectorcalc/geometry.hpp"
#include "sectorcalc/quadrature.hpp"
#include "sectorcalc/types.hpp"

namespace sectorcalc {

/// Matrix exponential by scaling and squaring with diagonal Pade approximants (orders 3..13).
Matrix expm(const Matrix& A);

/// Largest singular value.
double opnorm(const Matrix& A);

/// Commuting generators A_1..A_k with the closed sectors on which each T_j(zeta) = exp(zeta A_j) is used.
struct CommutingTuple {
    std::vector<Matrix> A;
    std::vector<Sector> domains;
    std::vector<Vector> eigenvalues;
    std::vector<Matrix> eigenvectors;
    std::vector<double> eigvec_condition;

    static CommutingTuple make(std::vector<Matrix> A, std::vector<Sector> domains);

    std::size_t k() const { return A.size(); }
    Eigen::Index dim() const { return A.empty() ? 0 : A.front().rows(); }
};

Matrix evaluate(const CommutingTuple& T, std::size_t j, Complex zeta);

/// (lambda A_j + zeta I)^{-1}, with an eigenvalue-distance singularity check.
Matrix resolvent_factor(const CommutingTuple& T, std::size_t j, Complex lambda, Complex zeta);

Matrix resolvent_product(const CommutingTuple& T, const Point& lambda, const Point& zeta);

/// max over eigenvalues mu of A_j of Re(e^{i omega} lambda mu): the exponential growth rate of
/// t -> exp(t e^{i omega} lambda A_j).
double growth_abscissa(const CommutingTuple& T, std::size_t j, Complex lambda, double omega);

struct GrowthProfile {
    std::vector<Complex> lambda;
    const CommutingTuple* tuple = nullptr;
    double h(std::size_t j, double omega) const { return growth_abscissa(*tuple, j, lambda[j], omega); }
};

struct LaplaceResolvent {
    Matrix value;
    Matrix direct;
    double rel_error = 0.0;
    double error_estimate = 0.0;
    double norm = 0.0;
    double norm_bound = 0.0;
    bool bound_holds = false;
};

/// (lambda I - A_j)^{-1} as the integral of e^{-s lambda} T_j(s) along the ray through `direction`.
LaplaceResolvent resolvent_via_laplace(const CommutingTuple& T, std::size_t j, Complex lambda, Complex direction,
                                       double tol);

struct WeightedGenerator {
    Matrix generator;
    Matrix B;
    Matrix C;
};

/// Generator as -C B^{-1} with B, C the integrals of t e^{-lambda t} T(t) and of its derivative weight.
WeightedGenerator generator_from_weighted_integrals(const CommutingTuple& T, std::size_t j, double lambda, double tol);

struct DifferenceQuotient {
    Vector value;
    double residual = 0.0;
};

std::vector<double> default_difference_steps();

DifferenceQuotient generator_from_difference_quotient(const CommutingTuple& T, std::size_t j, const Vector& u,
                                                      const std::vector<double>& steps = default_difference_steps());

/// T'(zeta0) T(zeta0)^{-1}, with the derivative taken by a Cauchy integral on a small circle.
Matrix generator_holomorphic(const CommutingTuple& T, std::size_t j, Complex zeta0);

enum class NClass { InN0, InNOnly, Outside };

const char* to_string(NClass c);

/// Rejects lambda when some lambda_j e^{i omega}, omega in {alpha_j, beta_j}, leaves the declared domain.
void validate_lambda(const CommutingTuple& T, const Point& lambda, const ProductSector& ab);

NClass n_set_classify(const CommutingTuple& T, const Point& lambda, const ProductSector& ab, const Point& z);

struct GapResult {
    double brute_force = 0.0;
    double closed_form = 0.0;
    double argmax = 0.0;
};

/// sup over (0,1] of |x^t - x^s|.
GapResult mult_semigroup_gap(double t, double s);

/// Right-shift semigroup on L^2[0,1] discretized on n cells with linear interpolation.
Matrix shift_matrix(int n, double t);
double quasinilpotent_gap(int n, double t);

}  // namespace sectorcalc
