#pragma once

#include <cstdint>
#include <vector>

#include "sectorcalc/types.hpp"

namespace sectorcalc {

constexpr double kMembershipTol = 1e-12;

/// Sector of angles (alpha, beta); the closed set with alpha == beta is a ray.
struct Sector {
    double alpha = 0.0;
    double beta = 0.0;

    Sector() = default;
    Sector(double a, double b);

    double aperture() const { return beta - alpha; }
    double bisector() const { return 0.5 * (alpha + beta); }
    bool is_ray() const { return beta == alpha; }
};

bool operator==(const Sector& a, const Sector& b);

using ProductSector = std::vector<Sector>;

Sector dual_sector(const Sector& s);

/// True when the open dual sector is empty (beta == alpha + pi).
bool dual_is_degenerate(const Sector& s);

bool contains(const Sector& s, Complex zeta, bool closed);

/// Distance from p to the closed sector with apex 0.
double distance_to_closed_sector(const Sector& s, Complex p);

double distance_to_ray(Complex p, Complex origin, Complex direction);
double distance_to_segment(Complex p, Complex a, Complex b);

bool preceq(const Point& z, const Point& zp, const ProductSector& ps);

struct SupResult {
    Point point;
    bool unique = true;
};

SupResult sup_points(const std::vector<Point>& zs, const ProductSector& ps);

/// One factor U_j of an admissible product region.  The boundary runs in along the
/// ray z + t e^{i(-pi/2-alpha)} from infinity to polyline.front(), follows the polyline,
/// and leaves along z + t e^{i(pi/2-beta)} from polyline.back().
struct AxisRegion {
    Sector sector;
    Complex vertex{0.0, 0.0};
    std::vector<Complex> polyline;

    Complex in_direction() const;
    Complex out_direction() const;
    Complex start() const { return polyline.front(); }
    Complex end() const { return polyline.back(); }
    double s0() const;
    double s1() const;
    bool is_half_plane() const { return sector.is_ray(); }
    /// Radius of a disk around the vertex containing every finite boundary piece.
    double excision_extent() const;

    bool contains(Complex zeta) const;
    double dist_to_boundary(Complex zeta) const;
    AxisRegion translated(Complex eps) const;
};

struct AdmissibleRegion {
    std::vector<AxisRegion> axes;

    std::size_t k() const { return axes.size(); }
    ProductSector sectors() const;
    Point vertex() const;
    bool contains(const Point& zeta) const;
    AdmissibleRegion translated(const Point& eps) const;

    /// Checks injectivity of the polylines, containment in the translated dual cones
    /// and cone stability on sampled points; throws DomainError with the first failure.
    void validate(std::uint64_t seed = 7) const;
};

AxisRegion pure_cone(const Sector& s, Complex vertex);
/// Cone minus the quarter-ellipse {x^2/r0^2 + y^2/r1^2 <= 1} written in the edge coordinates
/// of the dual cone; with r0 == r1 and a right-angled cone this is a true disk.
AxisRegion cone_minus_disk(const Sector& s, Complex vertex, double r0, double r1, int samples = 32);
/// Cone minus the parallelogram spanned by s0 and s1 along the two dual edges.
AxisRegion cone_minus_rectangle(const Sector& s, Complex vertex, double s0, double s1);
/// Half-plane {Re(zeta e^{i alpha}) > Re(vertex e^{i alpha})}.
AxisRegion half_plane(double alpha, Complex vertex);

AdmissibleRegion product_region(std::vector<AxisRegion> axes);

double dist_to_boundary(const AdmissibleRegion& U, std::size_t j, Complex zeta);

AdmissibleRegion intersect_admissible(const AdmissibleRegion& U1, const AdmissibleRegion& U2);
AxisRegion intersect_axis(const AxisRegion& a, const AxisRegion& b);

}  // namespace sectorcalc
