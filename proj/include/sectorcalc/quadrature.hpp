#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sectorcalc/geometry.hpp"
#include "sectorcalc/types.hpp"

namespace sectorcalc {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int points);

/// Infinite geometry of one piece of a contour.  Rays start at `a` and extend along `dir`;
/// an inward ray is traversed from infinity towards `a`.
struct PathPiece {
    enum class Kind { Segment, Ray };
    Kind kind = Kind::Segment;
    Complex a{0.0, 0.0};
    Complex b{0.0, 0.0};
    Complex dir{1.0, 0.0};
    bool inward = false;
    bool grade_at_start = false;
};

using PathSpec = std::vector<PathPiece>;

struct PathSegment {
    PathPiece::Kind kind = PathPiece::Kind::Segment;
    Complex start{0.0, 0.0};
    Complex direction{1.0, 0.0};
    double length = 0.0;
    bool inward = false;
    double truncation = std::numeric_limits<double>::infinity();
    std::vector<Complex> points;
    std::vector<Complex> weights;
};

struct DiscretizeOptions {
    int panel_points = 16;
    int grading_levels = 4;
    double grading_ratio = 1.5;
    /// Beyond this radius, panels on rays grow with the distance from the origin.
    double feature_radius = 0.0;
    bool geometric_tail = true;
    /// Close each ray with a mapped panel pair covering [R, infinity).
    bool infinite_tail = true;
};

/// Upper bound on the integrand magnitude along a ray, in the ray parameter t:
/// constant * exp(-rate t) * (1 + t)^(-power).
struct DecayEnvelope {
    double constant = 1.0;
    double rate = 0.0;
    double power = 0.0;

    /// Radius beyond which the tail integral of the envelope is below `eps`.
    double truncation_for(double eps) const;
};

struct AxisNodes {
    std::vector<Complex> points;
    std::vector<Complex> weights;
    std::size_t size() const { return points.size(); }
};

std::vector<PathSegment> discretize(const PathSpec& spec, double R, double n_per_unit, const DiscretizeOptions& opt);
AxisNodes flatten(const std::vector<PathSegment>& segs);

/// Oriented boundary of U_j + eps_j.
PathSpec boundary_spec(const AxisRegion& a);

std::vector<PathSegment> build_boundary_path(const AdmissibleRegion& U, std::size_t j, Complex eps, double R,
                                             double n_per_unit, const DiscretizeOptions& opt = {});

struct ContourQuadrature {
    std::vector<PathSpec> specs;
    double R = 16.0;
    double n_per_unit = 8.0;
    DiscretizeOptions options;

    std::vector<AxisNodes> axes() const;
    std::size_t node_count() const;
    ContourQuadrature refined() const;
};

/// Contour quadrature over the distinguished boundary of U + eps.
ContourQuadrature boundary_quadrature(const AdmissibleRegion& U, const Point& eps, double R, double n_per_unit,
                                      const DiscretizeOptions& opt = {});

struct IntegrationConfig {
    double tol = 1e-8;
    int max_rounds = 8;
    int min_rounds = 2;
    bool relative = false;
    /// With `relative`, the tolerance is scaled by max(|value|, scale_floor).
    double scale_floor = 1e-300;
    int threads = 1;
};

struct IntegrationResult {
    Matrix value;
    double error_estimate = 0.0;
    int rounds = 0;
    std::size_t nodes = 0;
    double R = 0.0;
    double n_per_unit = 0.0;
    std::vector<double> history;
};

using Integrand = std::function<Matrix(std::span<const Complex> z, std::span<const std::size_t> idx)>;
using PrepareHook = std::function<void(const std::vector<AxisNodes>&)>;

/// One tensor-product quadrature sum with a fixed summation order.
Matrix quadrature_sum(const Integrand& f, const std::vector<AxisNodes>& axes, int threads);

IntegrationResult integrate(const Integrand& f, ContourQuadrature cq, const IntegrationConfig& cfg,
                            const PrepareHook& prepare = nullptr);

using RayIntegrand = std::function<Matrix(Complex sigma)>;

/// Integral of f(sigma) d sigma along start + t*direction, t in [0, inf).
IntegrationResult ray_integral(const RayIntegrand& f, Complex start, Complex direction, const IntegrationConfig& cfg,
                               const DecayEnvelope& env = {}, double feature_radius = 0.0);

/// Scalar convenience wrapper.
Complex ray_integral_scalar(const std::function<Complex(Complex)>& f, Complex start, Complex direction,
                            const IntegrationConfig& cfg, const DecayEnvelope& env = {}, double feature_radius = 0.0);

/// Fixed-order compensated accumulator.
class KahanMatrix {
public:
    void add(const Matrix& x);
    const Matrix& sum() const { return sum_; }
    bool empty() const { return sum_.size() == 0; }

private:
    Matrix sum_;
    Matrix comp_;
};

int default_thread_count();

}  // namespace sectorcalc
