#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sectorcalc/functionals.hpp"
#include "sectorcalc/geometry.hpp"
#include "sectorcalc/quadrature.hpp"
#include "sectorcalc/semigroups.hpp"
#include "sectorcalc/types.hpp"

namespace sectorcalc {

using Evaluator = std::function<Complex(const Point&)>;

enum class FunctionClass { H1, Hinf, Smirnov };
const char* to_string(FunctionClass c);

/// |F(sigma)| <= c prod_j (1 + |sigma_j|)^{-p}.
struct DecayCertificate {
    double c = 1.0;
    double p = 2.0;
};

/// A holomorphic function on an admissible region, tagged with the class it is used in.
struct HoloFunction {
    Evaluator f;
    FunctionClass cls = FunctionClass::H1;
    AdmissibleRegion region;
    std::optional<DecayCertificate> decay;
    /// Smirnov witness pair: G (claimed strongly outer) and F*G (bounded).
    Evaluator witness;
    Evaluator witness_product;

    Complex operator()(const Point& z) const { return f(z); }
    std::size_t k() const { return region.k(); }

    /// Evaluates on a deterministic sample of the region and checks finiteness (and boundedness
    /// of F*G for Smirnov functions); throws DomainError.
    void validate(std::size_t samples = 1000, std::uint64_t seed = 11) const;
};

/// Deterministic sample of points inside a region (interior grid points along rays of the dual cones).
std::vector<Point> sample_region(const AdmissibleRegion& U, std::size_t count, std::uint64_t seed);

struct AdmissibilityReport {
    bool region_ok = false;
    bool anchor_ok = false;
    bool spectrum_ok = false;
    /// Per-axis minimum distance from -lambda_j sigma(A_j) to the boundary of U_j (negative when outside).
    std::vector<double> margins;
    NClass anchor_class = NClass::Outside;
    std::string message;
    bool ok() const { return region_ok && anchor_ok && spectrum_ok; }
};

AdmissibilityReport check_admissible_for(const AdmissibleRegion& U, const CommutingTuple& T, const Point& lambda,
                                         const ProductSector& ab);

struct CalculusOptions {
    double tol = 1e-9;
    int threads = 1;
    /// Starting truncation radius beyond the excision extent and node density per unit length.
    double radius_margin = 16.0;
    double n_per_unit = 4.0;
    /// Evaluate a single rule at (radius_margin, n_per_unit) without refinement (convergence studies).
    bool fixed_rule = false;
    /// Condition-number limit for inverting the image of the regularizer.
    double max_condition = 1e10;
};

struct CalculusResult {
    Matrix value;
    double error_estimate = 0.0;
    int rounds = 0;
    std::size_t nodes = 0;
};

/// (2 i pi)^{-k} integral over the distinguished boundary of U + eps of F(zeta) prod_j (lambda_j A_j + zeta_j I)^{-1}.
/// The boundary is traversed as documented on AxisRegion, which runs clockwise around U_j; the result is
/// reported with the orientation that makes F -> F(-lambda sigma(A)) on eigenvectors.
CalculusResult functional_calculus(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                                   const AdmissibleRegion& U, const Point& eps, const CalculusOptions& opt = {});

/// The regularizer G(zeta) = prod_j (zeta_j e^{i theta_j} + s_j)^{-2} used by the bounded extension.
struct Regularizer {
    std::vector<double> theta;
    std::vector<double> s;
    Complex operator()(const Point& z) const;
    /// Closed form G(-lambda A) = prod_j (s_j I - lambda_j e^{i theta_j} A_j)^{-2}.
    Matrix at_tuple(const CommutingTuple& T, const Point& lambda) const;
};

Regularizer make_regularizer(const CommutingTuple& T, const Point& lambda, const AdmissibleRegion& U);

/// R_F = FC(F G) FC(G)^{-1} for bounded F.
CalculusResult functional_calculus_hinf(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                                        const AdmissibleRegion& U, const CalculusOptions& opt = {});

/// R_F = hinf(F W) hinf(W)^{-1} with the witness pair W, F W of a Smirnov-class function.
CalculusResult functional_calculus_smirnov(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                                           const AdmissibleRegion& U, const CalculusOptions& opt = {});

/// Dispatches on the class tag (H1 uses eps = 0).
CalculusResult apply_calculus(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                              const AdmissibleRegion& U, const CalculusOptions& opt = {});

struct SpectralMapReport {
    double max_rel_error = 0.0;
    Matrix value;
    Matrix oracle;
    /// Diagonal of the result in the joint eigenbasis and F(-lambda mu) per joint eigenvalue.
    std::vector<Complex> eigen_value;
    std::vector<Complex> eigen_oracle;
};

/// Compares the calculus against V diag(F(-lambda mu)) V^{-1} on a jointly diagonalizable tuple.
SpectralMapReport spectral_map_check(const HoloFunction& F, const CommutingTuple& T, const Point& lambda,
                                     const AdmissibleRegion& U, const CalculusOptions& opt = {});

/// Common eigenvectors (columns) of a commuting diagonalizable tuple and the joint eigenvalues mu[i][j]
/// of A_j on column i; throws DomainError when no well-conditioned joint eigenbasis exists.
struct JointEigenbasis {
    Matrix V;
    std::vector<Point> mu;
};
JointEigenbasis joint_eigenbasis(const CommutingTuple& T);

/// Oracle F(-lambda A) through a joint eigendecomposition; throws DomainError if the tuple is not diagonalizable.
Matrix spectral_oracle(const Evaluator& F, const CommutingTuple& T, const Point& lambda);

/// max over boundary nodes of || prod_j (lambda_j A_j + zeta_j I)^{-1} ||.
double boundary_resolvent_bound(const CommutingTuple& T, const Point& lambda, const AdmissibleRegion& U,
                                const CalculusOptions& opt = {});

struct H1Norm {
    double value = 0.0;
    Point argmax;
    /// The sup is taken over a finite grid, so the value is a lower bound of the norm.
    bool lower_bound = true;
};

/// Default grid: eps = 0 plus 8 directions across the dual cone times moduli 2^-3..2^2.
std::vector<Point> default_eps_grid(const AdmissibleRegion& U);

H1Norm h1_norm(const Evaluator& F, const AdmissibleRegion& U, const std::vector<Point>& eps_grid, double tol = 1e-8);

struct PointwiseBound {
    double worst_ratio = 0.0;
    std::vector<double> ratios;
};

/// |F(zeta)| prod_j dist(zeta_j, boundary U_j) / ((2 pi)^{-k} ||F||) at each sample.
PointwiseBound pointwise_bound_check(const Evaluator& F, const AdmissibleRegion& U, const std::vector<Point>& samples,
                                     double norm);

struct WitnessSequence {
    std::vector<Evaluator> members;
};

struct OuterReport {
    bool dominated = false;       // |F| <= |F_n| on the grid for all n
    bool ratio_converges = false; // |F/F_n - 1| nonincreasing in n and small at the last n
    double worst_domination = 0.0;
    double worst_final_ratio = 0.0;
    double min_witness_modulus = 0.0;
    std::string verdict;
    bool passed() const { return dominated && ratio_converges && min_witness_modulus > 0.0; }
};

/// Grid evidence for strong outerness: conditions (i) and (ii) plus an invertibility proxy on
/// `boundary_grid`.  A pass means "consistent on the grid", never a proof.
OuterReport strongly_outer_check(const Evaluator& F, const WitnessSequence& witness, const std::vector<Point>& grid,
                                 const std::vector<Point>& boundary_grid, double final_tol = 0.05);

struct DiskDiagnostic {
    std::vector<double> radii;
    std::vector<double> circle_means;
    double boundary_mean = 0.0;
    /// |last circle mean - boundary mean|; large values flag a non-outer slice.
    double gap = 0.0;
};

DiskDiagnostic outer_diagnostic_disk(const std::function<Complex(Complex)>& f, const std::vector<double>& radii,
                                     int angles);

}  // namespace sectorcalc
