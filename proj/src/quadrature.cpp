#include "sectorcalc/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace sectorcalc {

namespace {

GaussRule compute_gauss_legendre(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute the derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int m = 2; m <= n; ++m) {
            double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        // nodes come out in decreasing order; store ascending on [0,1]
        r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

std::vector<double> ray_breaks(Complex a, Complex d, double T, double h, const DiscretizeOptions& opt, bool grade) {
    std::vector<double> br{0.0};
    double t = 0.0;
    if (grade) {
        for (int l = opt.grading_levels; l >= 1 && t < T; --l) {
            t = std::min(T, t + h * std::pow(opt.grading_ratio, -l));
            br.push_back(t);
        }
    }
    while (t < T) {
        double len = h;
        // the growth ratio shrinks with h so that refinement also resolves oscillation far out
        if (opt.geometric_tail)
            len = std::max(h, 0.5 * std::min(1.0, h / 4.0) * (std::abs(a + t * d) - opt.feature_radius));
        double next = t + len;
        if (next >= T || T - next < 0.25 * len) next = T;
        t = next;
        br.push_back(t);
    }
    return br;
}

}  // namespace

const GaussRule& gauss_legendre(int points) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    if (points < 1) throw DomainError("gauss_legendre: need at least one point");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(points);
    if (it == cache.end()) it = cache.emplace(points, compute_gauss_legendre(points)).first;
    return it->second;
}

double DecayEnvelope::truncation_for(double eps) const {
    if (eps <= 0.0) throw DomainError("truncation_for: eps must be positive");
    if (rate > 0.0) return std::max(0.0, std::log(constant / (rate * eps)) / rate);
    if (power > 1.0) return std::max(0.0, std::pow(constant / ((power - 1.0) * eps), 1.0 / (power - 1.0)) - 1.0);
    return 0.0;
}

std::vector<PathSegment> discretize(const PathSpec& spec, double R, double n_per_unit, const DiscretizeOptions& opt) {
    if (!(n_per_unit > 0.0)) throw DomainError("discretize: node density must be positive");
    const GaussRule& g = gauss_legendre(opt.panel_points);
    const double h = opt.panel_points / n_per_unit;
    std::vector<PathSegment> out;
    for (const PathPiece& p : spec) {
        PathSegment s;
        s.kind = p.kind;
        s.start = p.a;
        s.inward = p.inward;
        if (p.kind == PathPiece::Kind::Segment) {
            const Complex delta = p.b - p.a;
            s.length = std::abs(delta);
            s.direction = s.length > 0.0 ? delta / s.length : Complex(1.0, 0.0);
            if (s.length == 0.0) {
                out.push_back(std::move(s));
                continue;
            }
            const int m = std::max(1, static_cast<int>(std::ceil(s.length / h)));
            for (int i = 0; i < m; ++i)
                for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                    s.points.push_back(p.a + delta * ((i + g.nodes[q]) / m));
                    s.weights.push_back(delta * (g.weights[q] / m));
                }
        } else {
            s.direction = p.dir / std::abs(p.dir);
            const double aa = std::abs(p.a);
            if (aa >= R) {
                std::ostringstream msg;
                msg << "truncation radius " << R << " does not contain the path point at distance " << aa;
                throw DomainError(msg.str());
            }
            const double q = std::real(p.a * std::conj(s.direction));
            const double T = -q + std::sqrt(q * q - aa * aa + R * R);
            s.length = T;
            s.truncation = R;
            const std::vector<double> br = ray_breaks(p.a, s.direction, T, h, opt, p.grade_at_start);
            std::vector<double> ts, ws;
            for (std::size_t i = 0; i + 1 < br.size(); ++i) {
                const double len = br[i + 1] - br[i];
                for (std::size_t qq = 0; qq < g.nodes.size(); ++qq) {
                    ts.push_back(br[i] + len * g.nodes[qq]);
                    ws.push_back(len * g.weights[qq]);
                }
            }
            if (opt.infinite_tail) {
                // t = T + L u / (1 - u) maps [0, 1) onto [T, inf); algebraic and exponential
                // decay both become smooth in u
                const double L = std::max(h, std::abs(p.a + T * s.direction));
                for (double u0 : {0.0, 0.5})
                    for (std::size_t qq = 0; qq < g.nodes.size(); ++qq) {
                        const double u = u0 + 0.5 * g.nodes[qq];
                        ts.push_back(T + L * u / (1.0 - u));
                        ws.push_back(0.5 * g.weights[qq] * L / ((1.0 - u) * (1.0 - u)));
                    }
                s.truncation = std::numeric_limits<double>::infinity();
            }
            if (p.inward) {
                std::reverse(ts.begin(), ts.end());
                std::reverse(ws.begin(), ws.end());
            }
            const double sign = p.inward ? -1.0 : 1.0;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                s.points.push_back(p.a + ts[i] * s.direction);
                s.weights.push_back(sign * ws[i] * s.direction);
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

AxisNodes flatten(const std::vector<PathSegment>& segs) {
    AxisNodes n;
    for (const auto& s : segs) {
        n.points.insert(n.points.end(), s.points.begin(), s.points.end());
        n.weights.insert(n.weights.end(), s.weights.begin(), s.weights.end());
    }
    return n;
}

PathSpec boundary_spec(const AxisRegion& a) {
    PathSpec spec;
    const bool grade = !a.is_half_plane();
    PathPiece in;
    in.kind = PathPiece::Kind::Ray;
    in.a = a.start();
    in.dir = a.in_direction();
    in.inward = true;
    in.grade_at_start = grade;
    spec.push_back(in);
    for (std::size_t i = 0; i + 1 < a.polyline.size(); ++i) {
        PathPiece seg;
        seg.kind = PathPiece::Kind::Segment;
        seg.a = a.polyline[i];
        seg.b = a.polyline[i + 1];
        spec.push_back(seg);
    }
    PathPiece out;
    out.kind = PathPiece::Kind::Ray;
    out.a = a.end();
    out.dir = a.out_direction();
    out.grade_at_start = grade;
    spec.push_back(out);
    return spec;
}

std::vector<PathSegment> build_boundary_path(const AdmissibleRegion& U, std::size_t j, Complex eps, double R,
                                             double n_per_unit, const DiscretizeOptions& opt) {
    if (j >= U.k()) throw DomainError("build_boundary_path: axis out of range");
    const AxisRegion& a = U.axes[j];
    if (!contains(dual_sector(a.sector), eps, true)) throw DomainError("build_boundary_path: shift outside the dual cone");
    const AxisRegion shifted = a.translated(eps);
    if (R <= std::abs(shifted.vertex) + shifted.excision_extent())
        throw DomainError("build_boundary_path: truncation radius does not contain the excision");
    return discretize(boundary_spec(shifted), R, n_per_unit, opt);
}

std::vector<AxisNodes> ContourQuadrature::axes() const {
    std::vector<AxisNodes> out;
    for (const auto& s : specs) out.push_back(flatten(discretize(s, R, n_per_unit, options)));
    return out;
}

std::size_t ContourQuadrature::node_count() const {
    std::size_t n = 1;
    for (const auto& a : axes()) n *= a.size();
    return n;
}

ContourQuadrature ContourQuadrature::refined() const {
    ContourQuadrature c = *this;
    c.R *= 2.0;
    c.n_per_unit *= 2.0;
    return c;
}

ContourQuadrature boundary_quadrature(const AdmissibleRegion& U, const Point& eps, double R, double n_per_unit,
                                      const DiscretizeOptions& opt) {
    if (eps.size() != U.k()) throw DomainError("boundary_quadrature: shift dimension mismatch");
    ContourQuadrature cq;
    cq.R = R;
    cq.n_per_unit = n_per_unit;
    cq.options = opt;
    for (std::size_t j = 0; j < U.k(); ++j) {
        const AxisRegion& a = U.axes[j];
        if (!contains(dual_sector(a.sector), eps[j], true))
            throw DomainError("boundary_quadrature: shift outside the dual cone");
        const AxisRegion s = a.translated(eps[j]);
        cq.options.feature_radius = std::max(cq.options.feature_radius, std::abs(s.vertex) + s.excision_extent());
        cq.specs.push_back(boundary_spec(s));
    }
    return cq;
}

void KahanMatrix::add(const Matrix& x) {
    if (sum_.size() == 0) {
        sum_ = x;
        comp_ = Matrix::Zero(x.rows(), x.cols());
        return;
    }
    Matrix y = x - comp_;
    Matrix t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = std::move(t);
}

int default_thread_count() {
    if (const char* env = std::getenv("SECTORCALC_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

Matrix quadrature_sum(const Integrand& f, const std::vector<AxisNodes>& axes, int threads) {
    const std::size_t k = axes.size();
    if (k == 0) throw DomainError("quadrature_sum: no axes");
    for (const auto& a : axes)
        if (a.size() == 0) throw DomainError("quadrature_sum: empty axis");
    const std::size_t outer = axes[0].size();
    std::vector<Matrix> partial(outer);

    auto block = [&](std::size_t i0) {
        std::vector<std::size_t> idx(k, 0);
        std::vector<Complex> z(k);
        idx[0] = i0;
        std::size_t inner = 1;
        for (std::size_t j = 1; j < k; ++j) inner *= axes[j].size();
        KahanMatrix acc;
        for (std::size_t lin = 0; lin < inner; ++lin) {
            std::size_t rem = lin;
            for (std::size_t j = k; j-- > 1;) {
                idx[j] = rem % axes[j].size();
                rem /= axes[j].size();
            }
            Complex w(1.0, 0.0);
            for (std::size_t j = 0; j < k; ++j) {
                z[j] = axes[j].points[idx[j]];
                w *= axes[j].weights[idx[j]];
            }
            Matrix v = f(std::span<const Complex>(z), std::span<const std::size_t>(idx));
            if (!v.allFinite()) {
                std::ostringstream msg;
                msg << "non-finite integrand value at node (";
                for (std::size_t j = 0; j < k; ++j) msg << (j ? ", " : "") << z[j];
                msg << ")";
                throw ConvergenceError(msg.str());
            }
            acc.add(w * v);
        }
        partial[i0] = acc.sum();
    };

    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(outer)));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < outer; ++i) block(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr err;
        std::mutex err_mu;
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= outer) return;
                    try {
                        block(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mu);
                        if (!err) err = std::current_exception();
                        next.store(outer);
                        return;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }
    KahanMatrix total;
    for (const auto& p : partial) total.add(p);
    return total.sum();
}

IntegrationResult integrate(const Integrand& f, ContourQuadrature cq, const IntegrationConfig& cfg,
                            const PrepareHook& prepare) {
    IntegrationResult res;
    Matrix prev;
    for (int r = 0; r < cfg.max_rounds; ++r) {
        const std::vector<AxisNodes> axes = cq.axes();
        if (prepare) prepare(axes);
        Matrix value = quadrature_sum(f, axes, cfg.threads);
        std::size_t nodes = 1;
        for (const auto& a : axes) nodes *= a.size();
        res.value = value;
        res.rounds = r + 1;
        res.nodes = nodes;
        res.R = cq.R;
        res.n_per_unit = cq.n_per_unit;
        if (r > 0) {
            const double diff = (value - prev).norm();
            res.error_estimate = diff;
            res.history.push_back(diff);
            const double scale = cfg.relative ? std::max(value.norm(), cfg.scale_floor) : 1.0;
            if (r + 1 >= cfg.min_rounds && diff <= cfg.tol * scale) return res;
        }
        prev = std::move(value);
        cq = cq.refined();
    }
    std::ostringstream msg;
    msg << "contour quadrature did not converge after " << cfg.max_rounds << " rounds (last successive difference "
        << res.error_estimate << ", tolerance " << cfg.tol << ")";
    throw ConvergenceError(msg.str());
}

IntegrationResult ray_integral(const RayIntegrand& f, Complex start, Complex direction, const IntegrationConfig& cfg,
                               const DecayEnvelope& env, double feature_radius) {
    if (std::abs(direction) == 0.0) throw DomainError("ray_integral: zero direction");
    PathPiece p;
    p.kind = PathPiece::Kind::Ray;
    p.a = start;
    p.dir = direction / std::abs(direction);
    p.grade_at_start = true;
    ContourQuadrature cq;
    cq.specs = {PathSpec{p}};
    cq.R = std::abs(start) + std::max(16.0, env.truncation_for(cfg.tol * 1e-2));
    cq.n_per_unit = 8.0;
    cq.options.feature_radius = std::max(feature_radius, std::abs(start));
    return integrate([&](std::span<const Complex> z, std::span<const std::size_t>) { return f(z[0]); }, cq, cfg);
}

Complex ray_integral_scalar(const std::function<Complex(Complex)>& f, Complex start, Complex direction,
                            const IntegrationConfig& cfg, const DecayEnvelope& env, double feature_radius) {
    auto g = [&](Complex s) {
        Matrix m(1, 1);
        m(0, 0) = f(s);
        return m;
    };
    return ray_integral(g, start, direction, cfg, env, feature_radius).value(0, 0);
}

}  // namespace sectorcalc
