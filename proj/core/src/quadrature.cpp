#include "cyl/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

#include "cyl/constants.hpp"

namespace cyl {

namespace {

// 15-point Kronrod nodes on [0,1) half line; odd indices carry the 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Node15 {
    std::array<double, 15> x;   // on [-1,1]
    std::array<double, 15> wk;  // Kronrod weights
    std::array<double, 15> wg;  // Gauss weights (zero off the Gauss nodes)
};

const Node15& node15() {
    static const Node15 n = [] {
        Node15 r{};
        int k = 0;
        for (int i = 0; i < 7; ++i) {
            r.x[k] = -kXgk[i];
            r.wk[k] = kWgk[i];
            r.wg[k] = (i % 2 == 1) ? kWg[i / 2] : 0.0;
            ++k;
        }
        r.x[k] = 0.0;
        r.wk[k] = kWgk[7];
        r.wg[k] = kWg[3];
        ++k;
        for (int i = 6; i >= 0; --i) {
            r.x[k] = kXgk[i];
            r.wk[k] = kWgk[i];
            r.wg[k] = (i % 2 == 1) ? kWg[i / 2] : 0.0;
            ++k;
        }
        return r;
    }();
    return n;
}

constexpr double kEps = std::numeric_limits<double>::epsilon();

double scale_error(double raw, double resasc, double resabs) {
    double e = raw;
    if (resasc > 0.0 && e > 0.0) e = resasc * std::min(1.0, std::pow(200.0 * e / resasc, 1.5));
    return std::max(e, 50.0 * kEps * resabs);
}

bool within(double err, double value, const QuadratureSpec& s) {
    return err <= std::max(s.abs_tol, s.rel_tol * std::abs(value));
}

struct Cell1 {
    int piece;
    double u0, u1;
    double value, err;
};

struct Cell2 {
    int px, py;
    double u0, u1, v0, v1;
    double value, err;
    int split;  // 0: x, 1: y, 2: both
};

template <class Cell>
struct ByError {
    const std::vector<Cell>* cells;
    bool operator()(int a, int b) const {
        const double ea = (*cells)[a].err, eb = (*cells)[b].err;
        if (ea != eb) return ea < eb;
        return a > b;
    }
};

}  // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidParameter("quadrature tolerances must be positive");
    if (max_subdivisions < 1) throw InvalidParameter("max_subdivisions must be at least 1");
}

QuadratureSpec QuadratureSpec::scaled(double factor) const {
    QuadratureSpec s = *this;
    s.rel_tol *= factor;
    s.abs_tol *= factor;
    return s;
}

IntegralResult& IntegralResult::operator+=(const IntegralResult& o) {
    value += o.value;
    error_estimate += o.error_estimate;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
}

double neumaier_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

Axis::Axis(std::vector<double> breakpoints, double tail_scale) : bp_(std::move(breakpoints)), tail_(tail_scale) {
    if (bp_.size() < 2) throw InvalidParameter("axis needs at least two breakpoints");
    for (std::size_t i = 1; i < bp_.size(); ++i)
        if (!(bp_[i] > bp_[i - 1])) throw InvalidParameter("axis breakpoints must increase");
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i)
        if (std::isinf(bp_[i]) && std::isinf(bp_[i + 1])) throw InvalidParameter("axis piece cannot be doubly infinite");
    if (!(tail_ > 0.0)) throw InvalidParameter("axis tail scale must be positive");
}

double Axis::map(int piece, double u, double& jac) const {
    const double a = bp_[piece], b = bp_[piece + 1];
    if (std::isfinite(a) && std::isfinite(b)) {
        jac = b - a;
        return a + (b - a) * u;
    }
    const double half_pi = 0.5 * pi;
    if (std::isfinite(a)) {
        const double L = std::max(tail_, std::abs(a));
        const double th = half_pi * u, c = std::cos(th);
        jac = L * half_pi / (c * c);
        return a + L * std::tan(th);
    }
    const double L = std::max(tail_, std::abs(b));
    const double th = half_pi * (1.0 - u), c = std::cos(th);
    jac = L * half_pi / (c * c);
    return b - L * std::tan(th);
}

std::vector<double> dyadic_breakpoints(double c, double scale, double lo, double hi) {
    std::vector<double> out;
    if (!(scale > 0.0)) return out;
    const double extent = std::isfinite(hi - lo) ? (hi - lo) : 1e300;
    out.push_back(c);
    for (double s = 0.25 * scale; s < extent && s < 1e300; s *= 2.0) {
        out.push_back(c - s);
        out.push_back(c + s);
        if (!std::isfinite(hi - lo) && s > 4.0 * std::max(1.0, std::abs(c)) && s > 64.0 * scale) break;
    }
    return out;
}

std::vector<double> merge_breakpoints(std::vector<double> a, double lo, double hi) {
    a.push_back(lo);
    a.push_back(hi);
    std::vector<double> kept;
    for (double x : a)
        if (x >= lo && x <= hi) kept.push_back(x);
    std::sort(kept.begin(), kept.end());
    std::vector<double> out;
    for (double x : kept) {
        if (!out.empty()) {
            const double p = out.back();
            if (x == p) continue;
            if (std::isfinite(x) && std::isfinite(p) &&
                std::abs(x - p) <= 1e-13 * std::max({1.0, std::abs(x), std::abs(p)})) {
                if (x == hi) out.back() = x;
                continue;
            }
        }
        out.push_back(x);
    }
    return out;
}

IntegralResult integrate_axis(const Fn1& f, const Axis& axis, const QuadratureSpec& spec) {
    spec.validate();
    const Node15& nd = node15();
    IntegralResult res;
    std::vector<Cell1> cells;
    auto eval = [&](Cell1& c) {
        const double h = c.u1 - c.u0, mid = 0.5 * (c.u0 + c.u1);
        std::array<double, 15> fv{};
        double k = 0.0, g = 0.0, kabs = 0.0;
        for (int i = 0; i < 15; ++i) {
            double jac;
            const double x = axis.map(c.piece, mid + 0.5 * h * nd.x[i], jac);
            const double v = f(x) * jac;
            fv[i] = std::isfinite(v) ? v : 0.0;
            k += nd.wk[i] * fv[i];
            g += nd.wg[i] * fv[i];
            kabs += nd.wk[i] * std::abs(fv[i]);
        }
        const double mean = 0.5 * k;
        double asc = 0.0;
        for (int i = 0; i < 15; ++i) asc += nd.wk[i] * std::abs(fv[i] - mean);
        const double hh = 0.5 * h;
        c.value = k * hh;
        c.err = scale_error(std::abs((k - g) * hh), asc * hh, kabs * hh);
        res.evaluations += 15;
    };
    for (int p = 0; p < axis.pieces(); ++p) {
        Cell1 c{p, 0.0, 1.0, 0.0, 0.0};
        eval(c);
        cells.push_back(c);
    }
    ByError<Cell1> cmp{&cells};
    std::priority_queue<int, std::vector<int>, ByError<Cell1>> pq(cmp);
    double total = 0.0, terr = 0.0;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
        pq.push(i);
        total += cells[i].value;
        terr += cells[i].err;
    }
    int splits = 0;
    while (!within(terr, total, spec) && splits < spec.max_subdivisions) {
        const int i = pq.top();
        pq.pop();
        Cell1 c = cells[i];
        const double m = 0.5 * (c.u0 + c.u1);
        if (!(m > c.u0 && m < c.u1)) {  // interval exhausted at machine precision
            cells[i].err = 0.0;
            terr -= c.err;
            continue;
        }
        Cell1 a{c.piece, c.u0, m, 0, 0}, b{c.piece, m, c.u1, 0, 0};
        eval(a);
        eval(b);
        total += a.value + b.value - c.value;
        terr += a.err + b.err - c.err;
        cells[i] = a;
        cells.push_back(b);
        pq.push(i);
        pq.push(static_cast<int>(cells.size()) - 1);
        ++splits;
    }
    std::vector<double> vals, errs;
    for (const auto& c : cells) {
        vals.push_back(c.value);
        errs.push_back(c.err);
    }
    res.value = neumaier_sum(vals);
    res.error_estimate = neumaier_sum(errs);
    res.converged = within(res.error_estimate, res.value, spec);
    return res;
}

IntegralResult integrate_2d(const Fn2& f, const Axis& ax, const Axis& ay, const QuadratureSpec& spec) {
    spec.validate();
    const Node15& nd = node15();
    IntegralResult res;
    std::vector<Cell2> cells;
    std::array<double, 15> ys{}, jy{};
    std::array<double, 225> fv{};
    auto eval = [&](Cell2& c) {
        const double hx = 0.5 * (c.u1 - c.u0), mx = 0.5 * (c.u0 + c.u1);
        const double hy = 0.5 * (c.v1 - c.v0), my = 0.5 * (c.v0 + c.v1);
        for (int j = 0; j < 15; ++j) ys[j] = ay.map(c.py, my + hy * nd.x[j], jy[j]);
        double kk = 0, gk = 0, kg = 0, kabs = 0;
        for (int i = 0; i < 15; ++i) {
            double jx;
            const double x = ax.map(c.px, mx + hx * nd.x[i], jx);
            double rowk = 0, rowg = 0, rowa = 0;
            for (int j = 0; j < 15; ++j) {
                double v = f(x, ys[j]) * jx * jy[j];
                if (!std::isfinite(v)) v = 0.0;
                fv[i * 15 + j] = v;
                rowk += nd.wk[j] * v;
                rowg += nd.wg[j] * v;
                rowa += nd.wk[j] * std::abs(v);
            }
            kk += nd.wk[i] * rowk;
            gk += nd.wg[i] * rowk;
            kg += nd.wk[i] * rowg;
            kabs += nd.wk[i] * rowa;
        }
        const double area = hx * hy;
        const double mean = kk / 4.0;
        double asc = 0.0;
        for (int i = 0; i < 15; ++i)
            for (int j = 0; j < 15; ++j) asc += nd.wk[i] * nd.wk[j] * std::abs(fv[i * 15 + j] - mean);
        const double ex = scale_error(std::abs(kk - gk) * area, asc * area, kabs * area);
        const double ey = scale_error(std::abs(kk - kg) * area, asc * area, kabs * area);
        c.value = kk * area;
        c.err = ex + ey;
        c.split = (ex > 4.0 * ey) ? 0 : (ey > 4.0 * ex ? 1 : 2);
        res.evaluations += 225;
    };
    for (int px = 0; px < ax.pieces(); ++px)
        for (int py = 0; py < ay.pieces(); ++py) {
            Cell2 c{px, py, 0.0, 1.0, 0.0, 1.0, 0, 0, 2};
            eval(c);
            cells.push_back(c);
        }
    ByError<Cell2> cmp{&cells};
    std::priority_queue<int, std::vector<int>, ByError<Cell2>> pq(cmp);
    double total = 0.0, terr = 0.0;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
        pq.push(i);
        total += cells[i].value;
        terr += cells[i].err;
    }
    int splits = 0;
    while (!within(terr, total, spec) && splits < spec.max_subdivisions) {
        const int i = pq.top();
        pq.pop();
        const Cell2 c = cells[i];
        const double mu = 0.5 * (c.u0 + c.u1), mv = 0.5 * (c.v0 + c.v1);
        const bool sx = (c.split != 1) && mu > c.u0 && mu < c.u1;
        const bool sy = (c.split != 0) && mv > c.v0 && mv < c.v1;
        if (!sx && !sy) {
            cells[i].err = 0.0;
            terr -= c.err;
            continue;
        }
        std::vector<Cell2> kids;
        const std::vector<std::pair<double, double>> xr =
            sx ? std::vector<std::pair<double, double>>{{c.u0, mu}, {mu, c.u1}}
               : std::vector<std::pair<double, double>>{{c.u0, c.u1}};
        const std::vector<std::pair<double, double>> yr =
            sy ? std::vector<std::pair<double, double>>{{c.v0, mv}, {mv, c.v1}}
               : std::vector<std::pair<double, double>>{{c.v0, c.v1}};
        for (auto [a0, a1] : xr)
            for (auto [b0, b1] : yr) {
                Cell2 k{c.px, c.py, a0, a1, b0, b1, 0, 0, 2};
                eval(k);
                kids.push_back(k);
            }
        total -= c.value;
        terr -= c.err;
        for (std::size_t k = 0; k < kids.size(); ++k) {
            total += kids[k].value;
            terr += kids[k].err;
            if (k == 0) {
                cells[i] = kids[k];
                pq.push(i);
            } else {
                cells.push_back(kids[k]);
                pq.push(static_cast<int>(cells.size()) - 1);
            }
        }
        ++splits;
    }
    std::vector<double> vals, errs;
    vals.reserve(cells.size());
    for (const auto& c : cells) {
        vals.push_back(c.value);
        errs.push_back(c.err);
    }
    res.value = neumaier_sum(vals);
    res.error_estimate = neumaier_sum(errs);
    res.converged = within(res.error_estimate, res.value, spec);
    return res;
}

IntegralResult integrate_interval(const Fn1& f, double a, double b, const QuadratureSpec& spec,
                                  std::vector<double> extra_breaks) {
    if (!(b > a)) throw InvalidParameter("integration interval must satisfy b > a");
    if (std::isinf(a)) throw InvalidParameter("lower limit must be finite");
    if (std::isinf(b) && extra_breaks.empty()) extra_breaks.push_back(a + 1.0);
    return integrate_axis(f, Axis(merge_breakpoints(std::move(extra_breaks), a, b)), spec);
}

IntegralResult integrate_radial(const Fn1& f, double R, const QuadratureSpec& spec) {
    if (!(R > 0.0)) throw InvalidParameter("radial interval must have R > 0");
    std::vector<double> br;
    if (spec.grading_center && spec.grading_scale > 0.0)
        br = dyadic_breakpoints((*spec.grading_center)(0), spec.grading_scale, 0.0, R);
    if (std::isinf(R)) br.push_back(1.0);
    return integrate_axis(f, Axis(merge_breakpoints(std::move(br), 0.0, R)), spec);
}

IntegralResult integrate_biradial(const Fn2& F, const BiradialDomain& dom, const QuadratureSpec& spec) {
    if (!(dom.zeta_max > dom.zeta_min) || !(dom.rho_max > 0.0)) throw InvalidParameter("empty bi-radial domain");
    const double scale = dom.core_scale > 0.0 ? dom.core_scale : 1.0;
    double extent = scale;
    for (double c : dom.zeta_centers) extent = std::max(extent, 2.0 * std::abs(c));
    std::vector<double> zb, rb;
    for (double c : dom.zeta_centers) {
        auto d = dyadic_breakpoints(c, scale, c - extent, c + extent);
        zb.insert(zb.end(), d.begin(), d.end());
    }
    if (std::isinf(dom.zeta_min)) zb.push_back(-extent - scale);
    if (std::isinf(dom.zeta_max)) zb.push_back(extent + scale);
    zb.push_back(0.0);
    if (dom.core_scale > 0.0) {
        auto d = dyadic_breakpoints(0.0, scale, 0.0, std::min(dom.rho_max, 2.0 * extent));
        rb.insert(rb.end(), d.begin(), d.end());
    }
    if (std::isinf(dom.rho_max)) rb.push_back(extent + scale);
    const Axis az(merge_breakpoints(std::move(zb), dom.zeta_min, dom.zeta_max), extent + scale);
    const Axis ar(merge_breakpoints(std::move(rb), 0.0, dom.rho_max), extent + scale);
    const double fourpi = 4.0 * pi;
    return integrate_2d([&](double z, double r) { return F(z, r) * fourpi * r * r; }, az, ar, spec);
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw InvalidParameter("Gauss rule needs n >= 1");
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

SphereRule sphere3_rule(int n) {
    if (n < 1) throw InvalidParameter("sphere rule needs n >= 1");
    SphereRule s;
    const GaussRule& gl = gauss_legendre(n);
    const int nphi = 2 * n;
    for (int a = 1; a <= n; ++a) {
        // Gauss-Chebyshev (second kind) in cos(chi) carries the sin^2(chi) weight exactly.
        const double ang = a * pi / (n + 1);
        const double xc = std::cos(ang), sc = std::sin(ang);
        const double wc = pi / (n + 1) * sc * sc;
        for (int b = 0; b < n; ++b) {
            const double xt = gl.x[b], st = std::sqrt(std::max(0.0, 1.0 - xt * xt));
            for (int c = 0; c < nphi; ++c) {
                const double ph = 2.0 * pi * (c + 0.5) / nphi;
                s.dirs.emplace_back(xc, sc * xt, sc * st * std::cos(ph), sc * st * std::sin(ph));
                s.w.push_back(wc * gl.w[b] * 2.0 * pi / nphi);
            }
        }
    }
    return s;
}

namespace {

IntegralResult sphere_doubling(const std::function<IntegralResult(const Vec4&)>& along, const QuadratureSpec& spec,
                               int n0, int nmax) {
    IntegralResult prev;
    bool have = false;
    for (int n = n0; n <= nmax; n *= 2) {
        const SphereRule rule = sphere3_rule(n);
        IntegralResult cur;
        cur.converged = true;
        std::vector<double> vals, errs;
        for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
            const IntegralResult r = along(rule.dirs[i]);
            vals.push_back(rule.w[i] * r.value);
            errs.push_back(rule.w[i] * r.error_estimate);
            cur.evaluations += r.evaluations;
            cur.converged = cur.converged && r.converged;
        }
        cur.value = neumaier_sum(vals);
        const double inner = neumaier_sum(errs);
        if (have) {
            cur.evaluations += prev.evaluations;
            cur.error_estimate = std::abs(cur.value - prev.value) + inner;
            cur.converged = cur.converged && within(cur.error_estimate, cur.value, spec);
            if (cur.converged || 2 * n > nmax) return cur;
        } else {
            cur.error_estimate = inf;
        }
        prev = cur;
        have = true;
    }
    prev.converged = false;
    return prev;
}

}  // namespace

IntegralResult integrate_ball4(const Fn4& f, double radius, const QuadratureSpec& spec, const Vec4& center) {
    spec.validate();
    if (!(radius > 0.0)) throw InvalidParameter("ball radius must be positive");
    const Vec4 p = spec.grading_center ? *spec.grading_center : center;
    const Vec4 d = p - center;
    if (d.norm() >= radius) throw InvalidParameter("polar center must lie inside the ball");
    QuadratureSpec inner = spec.scaled(0.1);
    inner.grading_center.reset();
    const double gs = spec.grading_scale;
    auto along = [&](const Vec4& w) {
        const double dw = d.dot(w);
        const double rmax = -dw + std::sqrt(dw * dw - d.squaredNorm() + radius * radius);
        std::vector<double> br;
        if (gs > 0.0) br = dyadic_breakpoints(0.0, gs, 0.0, rmax);
        const Axis ax(merge_breakpoints(std::move(br), 0.0, rmax));
        return integrate_axis([&](double r) { return f(p + r * w) * r * r * r; }, ax, inner);
    };
    return sphere_doubling(along, spec, 6, 48);
}

IntegralResult integrate_sphere3(const Fn4& f, double tau, const Vec4& center, const QuadratureSpec& spec) {
    spec.validate();
    if (!(tau > 0.0)) throw InvalidParameter("sphere radius must be positive");
    const double t3 = tau * tau * tau;
    auto along = [&](const Vec4& w) {
        IntegralResult r;
        r.value = f(center + tau * w) * t3;
        r.evaluations = 1;
        r.converged = true;
        return r;
    };
    return sphere_doubling(along, spec, 4, 128);
}

}  // namespace cyl
