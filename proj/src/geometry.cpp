#include "sectorcalc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace sectorcalc {

namespace {

constexpr double kAngleSlack = 1e-12;

double wrap_offset(double theta, double base) {
    double d = std::fmod(theta - base, 2.0 * kPi);
    if (d < 0.0) d += 2.0 * kPi;
    return d;
}

// Coordinates of w in the (non-orthogonal) real basis (u, v).
struct EdgeBasis {
    Complex u, v;
    double det;
    EdgeBasis(Complex u_, Complex v_) : u(u_), v(v_), det(std::imag(u_ * std::conj(v_))) {}
    double x(Complex w) const { return std::imag(w * std::conj(v)) / det; }
    double y(Complex w) const { return -std::imag(w * std::conj(u)) / det; }
    Complex at(double xx, double yy) const { return xx * u + yy * v; }
};

bool segments_intersect(Complex a, Complex b, Complex c, Complex d) {
    auto cross = [](Complex p, Complex q) { return std::imag(std::conj(p) * q); };
    double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on = [](Complex p, Complex q, Complex r) { return distance_to_segment(r, p, q) < 1e-13; };
    return on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b);
}

bool point_in_polygon(Complex p, const std::vector<Complex>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Complex a = poly[i], b = poly[j];
        if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
            double xc = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
            if (p.real() < xc) inside = !inside;
        }
    }
    return inside;
}

// Boundary chain written as s = h(d) with d = y - x and s = x + y in edge coordinates
// of the intersected cone; the region lies on the side of larger s.
struct PiecewiseLinear {
    std::vector<double> d, s;
    double left_slope = 0.0, right_slope = 0.0;

    double eval(double t) const {
        if (t <= d.front()) return s.front() + left_slope * (t - d.front());
        if (t >= d.back()) return s.back() + right_slope * (t - d.back());
        auto it = std::upper_bound(d.begin(), d.end(), t);
        std::size_t i = static_cast<std::size_t>(it - d.begin()) - 1;
        double w = (t - d[i]) / (d[i + 1] - d[i]);
        return s[i] + w * (s[i + 1] - s[i]);
    }
};

PiecewiseLinear chain_function(const AxisRegion& a, const EdgeBasis& B) {
    PiecewiseLinear f;
    for (Complex p : a.polyline) {
        double x = B.x(p), y = B.y(p);
        double dd = y - x, ss = x + y;
        if (!f.d.empty() && dd <= f.d.back() + 1e-13) {
            if (std::abs(ss - f.s.back()) > 1e-10 || dd < f.d.back() - 1e-10)
                throw DomainError("boundary chain is not monotone in the intersected cone order");
            continue;
        }
        f.d.push_back(dd);
        f.s.push_back(ss);
    }
    auto slope = [&](Complex dir) {
        double x = B.x(dir), y = B.y(dir);
        return (x + y) / (y - x);
    };
    f.left_slope = slope(a.in_direction());
    f.right_slope = slope(a.out_direction());
    return f;
}

PiecewiseLinear pointwise_max(const PiecewiseLinear& f, const PiecewiseLinear& g) {
    std::vector<double> bp(f.d);
    bp.insert(bp.end(), g.d.begin(), g.d.end());
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(), [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             bp.end());

    std::vector<double> pts(bp);
    auto diff = [&](double t) { return f.eval(t) - g.eval(t); };
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        double a = diff(bp[i]), b = diff(bp[i + 1]);
        if ((a > 0 && b < 0) || (a < 0 && b > 0)) pts.push_back(bp[i] + (bp[i + 1] - bp[i]) * a / (a - b));
    }
    {
        double a = diff(bp.front()), ds = f.left_slope - g.left_slope;
        if (ds != 0.0) {
            double t = bp.front() - a / ds;
            if (t < bp.front()) pts.push_back(t);
        }
        double b = diff(bp.back());
        ds = f.right_slope - g.right_slope;
        if (ds != 0.0) {
            double t = bp.back() - b / ds;
            if (t > bp.back()) pts.push_back(t);
        }
    }
    std::sort(pts.begin(), pts.end());

    PiecewiseLinear h;
    for (double t : pts) {
        h.d.push_back(t);
        h.s.push_back(std::max(f.eval(t), g.eval(t)));
    }
    auto far_winner = [&](double fs, double gs, double fv, double gv, bool left) {
        if (std::abs(fs - gs) > 1e-12) return left ? std::min(fs, gs) : std::max(fs, gs);
        return fv >= gv ? fs : gs;
    };
    h.left_slope = far_winner(f.left_slope, g.left_slope, f.eval(pts.front()), g.eval(pts.front()), true);
    h.right_slope = far_winner(f.right_slope, g.right_slope, f.eval(pts.back()), g.eval(pts.back()), false);

    // drop breakpoints where the function is locally linear
    PiecewiseLinear out;
    out.left_slope = h.left_slope;
    out.right_slope = h.right_slope;
    const std::size_t n = h.d.size();
    for (std::size_t i = 0; i < n; ++i) {
        double sl = (i == 0) ? h.left_slope : (h.s[i] - h.s[i - 1]) / (h.d[i] - h.d[i - 1]);
        double sr = (i + 1 == n) ? h.right_slope : (h.s[i + 1] - h.s[i]) / (h.d[i + 1] - h.d[i]);
        if (std::abs(sl - sr) > 1e-10 * (1.0 + std::abs(sl) + std::abs(sr))) {
            out.d.push_back(h.d[i]);
            out.s.push_back(h.s[i]);
        }
    }
    return out;
}

}  // namespace

Sector::Sector(double a, double b) : alpha(a), beta(b) {
    if (!(a <= b + kAngleSlack) || !(b <= a + kPi + kAngleSlack))
        throw DomainError("sector requires alpha <= beta <= alpha + pi");
    if (beta - alpha <= kAngleSlack) beta = alpha;
}

bool operator==(const Sector& a, const Sector& b) { return a.alpha == b.alpha && a.beta == b.beta; }

Sector dual_sector(const Sector& s) { return Sector(-0.5 * kPi - s.alpha, 0.5 * kPi - s.beta); }

bool dual_is_degenerate(const Sector& s) { return std::abs(s.beta - s.alpha - kPi) <= kAngleSlack; }

double distance_to_ray(Complex p, Complex origin, Complex direction) {
    Complex q = p - origin;
    double t = std::real(q * std::conj(direction));
    if (t <= 0.0) return std::abs(q);
    return std::abs(q - t * direction);
}

double distance_to_segment(Complex p, Complex a, Complex b) {
    Complex ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(std::real((p - a) * std::conj(ab)) / len2, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

double distance_to_closed_sector(const Sector& s, Complex p) {
    if (p == Complex(0.0, 0.0)) return 0.0;
    double off = wrap_offset(std::arg(p), s.alpha);
    if (off <= s.aperture() + kAngleSlack) return 0.0;
    return std::min(distance_to_ray(p, 0.0, cis(s.alpha)), distance_to_ray(p, 0.0, cis(s.beta)));
}

bool contains(const Sector& s, Complex zeta, bool closed) {
    if (std::abs(zeta) <= kMembershipTol) return closed;
    if (closed) return distance_to_closed_sector(s, zeta) <= kMembershipTol;
    if (s.is_ray()) return false;
    if (distance_to_closed_sector(s, zeta) > 0.0) return false;
    return distance_to_ray(zeta, 0.0, cis(s.alpha)) > kMembershipTol &&
           distance_to_ray(zeta, 0.0, cis(s.beta)) > kMembershipTol;
}

bool preceq(const Point& z, const Point& zp, const ProductSector& ps) {
    if (z.size() != ps.size() || zp.size() != ps.size()) throw DomainError("preceq: dimension mismatch");
    for (std::size_t j = 0; j < ps.size(); ++j)
        if (!contains(dual_sector(ps[j]), zp[j] - z[j], true)) return false;
    return true;
}

SupResult sup_points(const std::vector<Point>& zs, const ProductSector& ps) {
    if (zs.empty()) throw DomainError("sup_points: empty list");
    const std::size_t k = ps.size();
    SupResult r;
    r.point.assign(k, 0.0);
    for (const auto& z : zs)
        if (z.size() != k) throw DomainError("sup_points: dimension mismatch");
    for (std::size_t j = 0; j < k; ++j) {
        const Sector& s = ps[j];
        const Sector d = dual_sector(s);
        if (s.is_ray()) {
            Complex rot = cis(s.alpha);
            std::size_t best = 0;
            for (std::size_t i = 1; i < zs.size(); ++i)
                if (std::real(zs[i][j] * rot) > std::real(zs[best][j] * rot)) best = i;
            r.point[j] = zs[best][j];
            r.unique = false;
        } else if (dual_is_degenerate(s)) {
            Complex u = cis(d.alpha);
            std::size_t best = 0;
            for (std::size_t i = 0; i < zs.size(); ++i) {
                Complex w = zs[i][j] - zs[0][j];
                if (std::abs(std::imag(w * std::conj(u))) > 1e-12 * (1.0 + std::abs(w)))
                    throw DomainError("sup_points: translated rays do not intersect");
                if (std::real(zs[i][j] * std::conj(u)) > std::real(zs[best][j] * std::conj(u))) best = i;
            }
            r.point[j] = zs[best][j];
        } else {
            EdgeBasis B(cis(d.alpha), cis(d.beta));
            double xm = -std::numeric_limits<double>::infinity(), ym = xm;
            for (const auto& z : zs) {
                xm = std::max(xm, B.x(z[j]));
                ym = std::max(ym, B.y(z[j]));
            }
            r.point[j] = B.at(xm, ym);
        }
    }
    return r;
}

Complex AxisRegion::in_direction() const { return cis(-0.5 * kPi - sector.alpha); }
Complex AxisRegion::out_direction() const { return cis(0.5 * kPi - sector.beta); }
double AxisRegion::s0() const { return std::abs(start() - vertex); }
double AxisRegion::s1() const { return std::abs(end() - vertex); }

double AxisRegion::excision_extent() const {
    double r = 0.0;
    for (Complex p : polyline) r = std::max(r, std::abs(p - vertex));
    return r;
}

double AxisRegion::dist_to_boundary(Complex zeta) const {
    double d = std::min(distance_to_ray(zeta, start(), in_direction()), distance_to_ray(zeta, end(), out_direction()));
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i)
        d = std::min(d, distance_to_segment(zeta, polyline[i], polyline[i + 1]));
    return d;
}

bool AxisRegion::contains(Complex zeta) const {
    if (is_half_plane()) return std::real((zeta - vertex) * cis(sector.alpha)) > kMembershipTol;
    const Sector d = dual_sector(sector);
    if (!sectorcalc::contains(d, zeta - vertex, false)) return false;
    if (polyline.size() > 1) {
        std::vector<Complex> poly;
        poly.push_back(vertex);
        poly.insert(poly.end(), polyline.begin(), polyline.end());
        if (point_in_polygon(zeta, poly)) return false;
    }
    return dist_to_boundary(zeta) > kMembershipTol;
}

AxisRegion AxisRegion::translated(Complex eps) const {
    AxisRegion r = *this;
    r.vertex += eps;
    for (auto& p : r.polyline) p += eps;
    return r;
}

ProductSector AdmissibleRegion::sectors() const {
    ProductSector ps;
    for (const auto& a : axes) ps.push_back(a.sector);
    return ps;
}

Point AdmissibleRegion::vertex() const {
    Point z;
    for (const auto& a : axes) z.push_back(a.vertex);
    return z;
}

bool AdmissibleRegion::contains(const Point& zeta) const {
    if (zeta.size() != axes.size()) throw DomainError("region membership: dimension mismatch");
    for (std::size_t j = 0; j < axes.size(); ++j)
        if (!axes[j].contains(zeta[j])) return false;
    return true;
}

AdmissibleRegion AdmissibleRegion::translated(const Point& eps) const {
    if (eps.size() != axes.size()) throw DomainError("region translation: dimension mismatch");
    AdmissibleRegion r;
    for (std::size_t j = 0; j < axes.size(); ++j) r.axes.push_back(axes[j].translated(eps[j]));
    return r;
}

void AdmissibleRegion::validate(std::uint64_t seed) const {
    if (axes.empty()) throw DomainError("region must have at least one axis");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t j = 0; j < axes.size(); ++j) {
        const AxisRegion& a = axes[j];
        std::ostringstream where;
        where << "axis " << j << ": ";
        if (dual_is_degenerate(a.sector)) throw DomainError(where.str() + "sector aperture must be < pi");
        if (a.polyline.empty()) throw DomainError(where.str() + "empty boundary polyline");
        if (a.is_half_plane()) {
            if (a.polyline.size() != 1 || a.polyline[0] != a.vertex)
                throw DomainError(where.str() + "half-plane axis carries no excision");
            continue;
        }
        const double scale = 1.0 + a.excision_extent();
        if (distance_to_ray(a.start(), a.vertex, a.in_direction()) > 1e-9 * scale ||
            distance_to_ray(a.end(), a.vertex, a.out_direction()) > 1e-9 * scale)
            throw DomainError(where.str() + "polyline endpoints must lie on the dual cone edges");
        const Sector d = dual_sector(a.sector);
        for (Complex p : a.polyline)
            if (distance_to_closed_sector(d, p - a.vertex) > 1e-9 * scale)
                throw DomainError(where.str() + "polyline leaves the translated dual cone");
        const std::size_t n = a.polyline.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(a.polyline[i + 1] - a.polyline[i]) == 0.0)
                throw DomainError(where.str() + "repeated polyline sample");
            for (std::size_t m = i + 2; m + 1 < n; ++m)
                if (segments_intersect(a.polyline[i], a.polyline[i + 1], a.polyline[m], a.polyline[m + 1]))
                    throw DomainError(where.str() + "polyline is not injective");
        }
        // cone stability on points just inside the boundary
        const Complex bis = cis(d.bisector());
        std::vector<Complex> probes;
        for (Complex p : a.polyline) probes.push_back(p + 1e-6 * scale * bis);
        for (std::size_t i = 0; i + 1 < n; ++i)
            probes.push_back(0.5 * (a.polyline[i] + a.polyline[i + 1]) + 1e-6 * scale * bis);
        for (Complex u : probes) {
            if (!a.contains(u)) throw DomainError(where.str() + "region does not lie on the inner side of its boundary");
            for (int r = 0; r < 100; ++r) {
                double ang = d.alpha + unif(rng) * d.aperture();
                double mod = std::exp(std::log(1e-3) + unif(rng) * std::log(1e5));
                if (!a.contains(u + mod * cis(ang)))
                    throw DomainError(where.str() + "region is not stable under dual cone translations");
            }
        }
    }
}

AxisRegion pure_cone(const Sector& s, Complex vertex) {
    if (s.is_ray()) return half_plane(s.alpha, vertex);
    AxisRegion a;
    a.sector = s;
    a.vertex = vertex;
    a.polyline = {vertex};
    return a;
}

AxisRegion half_plane(double alpha, Complex vertex) {
    AxisRegion a;
    a.sector = Sector(alpha, alpha);
    a.vertex = vertex;
    a.polyline = {vertex};
    return a;
}

AxisRegion cone_minus_disk(const Sector& s, Complex vertex, double r0, double r1, int samples) {
    if (s.is_ray()) throw DomainError("cone_minus_disk needs a sector with alpha < beta");
    if (r0 <= 0.0 || r1 <= 0.0 || samples < 2) throw DomainError("cone_minus_disk: invalid radii or sample count");
    const Sector d = dual_sector(s);
    const Complex u = cis(d.alpha), v = cis(d.beta);
    AxisRegion a;
    a.sector = s;
    a.vertex = vertex;
    for (int i = 0; i <= samples; ++i) {
        double phi = 0.5 * kPi * i / samples;
        double c = (i == samples) ? 0.0 : std::cos(phi);
        double sn = (i == 0) ? 0.0 : std::sin(phi);
        a.polyline.push_back(vertex + r0 * c * u + r1 * sn * v);
    }
    return a;
}

AxisRegion cone_minus_rectangle(const Sector& s, Complex vertex, double s0, double s1) {
    if (s.is_ray()) throw DomainError("cone_minus_rectangle needs a sector with alpha < beta");
    if (s0 <= 0.0 || s1 <= 0.0) throw DomainError("cone_minus_rectangle: sides must be positive");
    const Sector d = dual_sector(s);
    const Complex u = cis(d.alpha), v = cis(d.beta);
    AxisRegion a;
    a.sector = s;
    a.vertex = vertex;
    a.polyline = {vertex + s0 * u, vertex + s0 * u + s1 * v, vertex + s1 * v};
    return a;
}

AdmissibleRegion product_region(std::vector<AxisRegion> axes) {
    AdmissibleRegion U;
    U.axes = std::move(axes);
    U.validate();
    return U;
}

double dist_to_boundary(const AdmissibleRegion& U, std::size_t j, Complex zeta) {
    if (j >= U.k()) throw DomainError("dist_to_boundary: axis out of range");
    const AxisRegion& a = U.axes[j];
    if (!a.contains(zeta) && a.dist_to_boundary(zeta) > kMembershipTol)
        throw DomainError("dist_to_boundary: point is not in the region");
    return a.dist_to_boundary(zeta);
}

AxisRegion intersect_axis(const AxisRegion& a, const AxisRegion& b) {
    const double alpha = std::min(a.sector.alpha, b.sector.alpha);
    const double beta = std::max(a.sector.beta, b.sector.beta);
    if (beta >= alpha + kPi - kAngleSlack)
        throw DomainError("intersection of the dual cones has empty interior");
    if (alpha == beta) {
        // parallel half-planes: keep the smaller one
        Complex rot = cis(alpha);
        return std::real(a.vertex * rot) >= std::real(b.vertex * rot) ? a : b;
    }
    const Sector s3(alpha, beta);
    const Sector d3 = dual_sector(s3);
    const EdgeBasis B(cis(d3.alpha), cis(d3.beta));
    PiecewiseLinear h = pointwise_max(chain_function(a, B), chain_function(b, B));
    if (h.d.empty() || std::abs(h.left_slope + 1.0) > 1e-8 || std::abs(h.right_slope - 1.0) > 1e-8)
        throw DomainError("intersection boundary is not asymptotic to the dual cone edges");
    AxisRegion r;
    r.sector = s3;
    const double y0 = 0.5 * (h.s.front() + h.d.front());
    const double x0 = 0.5 * (h.s.back() - h.d.back());
    r.vertex = B.at(x0, y0);
    for (std::size_t i = 0; i < h.d.size(); ++i) {
        double x = 0.5 * (h.s[i] - h.d[i]), y = 0.5 * (h.s[i] + h.d[i]);
        r.polyline.push_back(B.at(x, y));
    }
    if (r.polyline.size() == 1) r.polyline[0] = r.vertex;
    return r;
}

AdmissibleRegion intersect_admissible(const AdmissibleRegion& U1, const AdmissibleRegion& U2) {
    if (U1.k() != U2.k()) throw DomainError("intersect_admissible: dimension mismatch");
    AdmissibleRegion U;
    for (std::size_t j = 0; j < U1.k(); ++j) U.axes.push_back(intersect_axis(U1.axes[j], U2.axes[j]));
    return U;
}

}  // namespace sectorcalc
