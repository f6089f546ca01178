#include "cyl/cnc.hpp"

#include <algorithm>
#include <cmath>

namespace cyl {

void cutoff_profile(double s, double t, double out[3]) {
    if (!(t > 0.0)) throw InvalidParameter("cutoff scale must be positive");
    if (std::isinf(t) || s <= 0.25 * t) {
        out[0] = 1.0;
        out[1] = out[2] = 0.0;
        return;
    }
    if (s >= 0.5 * t) {
        out[0] = out[1] = out[2] = 0.0;
        return;
    }
    const double w = 0.25 * t;
    const double u = (s - w) / w;
    const double S = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    const double S1 = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    const double S2 = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
    out[0] = 1.0 - S;
    out[1] = -S1 / w;
    out[2] = -S2 / (w * w);
}

Jet2 CNCFactor::fbar(const Vec4& z) const {
    Jet2 r;
    Vec4 Cz2 = Vec4::Zero();
    Mat4 Cz = Mat4::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) Cz(i, j) += cubic_at(i, j, k) * z(k);
    Cz2 = Cz * z;
    r.v = z.dot(quad * z) + z.dot(Cz2);
    r.g = 2.0 * quad * z + 3.0 * Cz2;
    r.H = 2.0 * quad + 6.0 * Cz;
    return r;
}

Jet2 CNCFactor::fbar(const std::array<Jet2, 4>& z) const {
    Jet2 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Jet2 zz = z[i] * z[j];
            r += quad(i, j) * zz;
            for (int k = 0; k < 4; ++k) {
                const double c = cubic_at(i, j, k);
                if (c != 0.0) r += c * (zz * z[k]);
            }
        }
    return r;
}

Jet2 CNCFactor::f(const Vec4& z) const {
    const Jet2 fb = fbar(z);
    const double s = z.norm();
    if (std::isinf(t_cutoff) || s <= 0.25 * t_cutoff) return fb;
    double ph[3];
    cutoff_profile(s, t_cutoff, ph);
    if (ph[0] == 0.0 && ph[1] == 0.0 && ph[2] == 0.0) return Jet2(0.0);
    const Vec4 u = z / s;
    Jet2 phi;
    phi.v = ph[0];
    phi.g = ph[1] * u;
    phi.H = ph[2] * u * u.transpose() + ph[1] / s * (Mat4::Identity() - u * u.transpose());
    return phi * fb;
}

CNCFactor cnc_polynomial(const CurvatureSnapshot& s, double t_cutoff) {
    if (!(t_cutoff > 0.0)) throw InvalidParameter("cutoff scale must be positive");
    CNCFactor f;
    f.basepoint = s.x;
    f.t_cutoff = t_cutoff;
    const double R = s.R;
    auto dRic = [&](int k, int i, int j) { return s.dRic[k](i, j); };
    for (int i = 0; i < 4; ++i) {
        f.quad(i, i) = 0.25 * (2.0 * s.Ric(i, i) - R / 3.0);
        for (int j = i + 1; j < 4; ++j) f.quad(i, j) = f.quad(j, i) = 0.5 * s.Ric(i, j);
    }
    auto put = [&](int i, int j, int k, double v) { f.cubic[(i * 4 + j) * 4 + k] += v; };
    for (int i = 0; i < 4; ++i) put(i, i, i, (dRic(i, i, i) - s.dR(i) / 6.0) / 6.0);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            if (i == k) continue;
            const double a = (dRic(k, i, i) + 2.0 * dRic(i, i, k) - s.dR(k) / 6.0) / 6.0;
            put(i, i, k, a / 3.0);
            put(i, k, i, a / 3.0);
            put(k, i, i, a / 3.0);
        }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) {
                const double a = (dRic(k, i, j) + dRic(i, k, j) + dRic(j, i, k)) / 3.0;
                const int p[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
                for (auto& q : p) put(q[0], q[1], q[2], a / 6.0);
            }
    return f;
}

InverseExpTaylor::InverseExpTaylor(const MetricField& g, const Vec4& x, const Mat4& frame)
    : x_(x), Einv_(frame.inverse()), c_(christoffel(g.jet(x))) {}

std::array<Jet2, 4> InverseExpTaylor::operator()(const Vec4& p) const {
    std::array<Jet2, 4> w;
    for (int i = 0; i < 4; ++i) {
        w[i] = Jet2::variable(p, i);
        w[i].v -= x_(i);
    }
    // v^i = w^i + 1/2 G^i_jk w^j w^k + 1/6 (d_l G^i_jk + G^i_lm G^m_jk) w^l w^j w^k
    std::array<std::array<Jet2, 4>, 4> ww;
    for (int j = 0; j < 4; ++j)
        for (int k = j; k < 4; ++k) ww[j][k] = ww[k][j] = w[j] * w[k];
    std::array<Jet2, 4> v;
    for (int i = 0; i < 4; ++i) {
        Jet2 acc = w[i];
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                acc += 0.5 * c_.G[i](j, k) * ww[j][k];
                for (int l = 0; l < 4; ++l) {
                    double coef = c_.dG[l][i](j, k);
                    for (int m = 0; m < 4; ++m) coef += c_.G[i](l, m) * c_.G[m](j, k);
                    if (coef != 0.0) acc += (coef / 6.0) * (ww[j][k] * w[l]);
                }
            }
        v[i] = acc;
    }
    std::array<Jet2, 4> z;
    for (int a = 0; a < 4; ++a) {
        Jet2 acc;
        for (int i = 0; i < 4; ++i) acc += Einv_(a, i) * v[i];
        z[a] = acc;
    }
    return z;
}

Vec4 InverseExpTaylor::value(const Vec4& p) const {
    const auto z = (*this)(p);
    return Vec4(z[0].v, z[1].v, z[2].v, z[3].v);
}

double CNCResiduals::max() const { return std::max({R, Ric, dR, sym_dRic}); }

namespace {

CNCResiduals residuals_at(const MetricField& gbar, const Vec4& x, const Mat4& E, double h_fd) {
    const CurvatureSnapshot cs = curvature_at(gbar, x, h_fd);
    const CurvatureSnapshot n = to_normal_frame(gbar, cs, E);
    CNCResiduals r{};
    r.R = std::abs(n.R);
    r.Ric = n.Ric.cwiseAbs().maxCoeff();
    r.dR = n.dR.cwiseAbs().maxCoeff();
    r.sym_dRic = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                r.sym_dRic = std::max(r.sym_dRic, std::abs(n.dRic[k](i, j) + n.dRic[i](j, k) + n.dRic[j](i, k)));
    return r;
}

}  // namespace

CNCResiduals verify_cnc(FieldPtr field, const Vec4& x, double h_fd, std::optional<Vec4> first_axis, CNCRoute route) {
    if (!(h_fd > 0.0)) throw InvalidParameter("h_fd must be positive");
    const Vec4 axis = first_axis.value_or(default_first_axis(x));
    std::shared_ptr<const NormalChart> exact;
    if (route != CNCRoute::Chart) exact = field->exact_normal_chart(x, axis);
    if (route == CNCRoute::ExactNormal && !exact) throw InvalidParameter("field has no closed-form normal chart");
    if (exact) {
        const FieldPtr gn = exact->field();
        const CurvatureSnapshot s = curvature_at(*gn, Vec4::Zero(), h_fd);
        const CNCFactor f = cnc_polynomial(to_normal_frame(*gn, s, Mat4::Identity()), inf);
        ConformalField gbar(gn, [f](const Vec4& z) { return f.fbar(z); });
        CNCResiduals r = residuals_at(gbar, Vec4::Zero(), Mat4::Identity(), h_fd);
        r.factor = f;
        r.factor.basepoint = x;
        return r;
    }
    const Mat4 E = orthonormal_frame(field->metric(x), axis);
    const CurvatureSnapshot s = curvature_at(*field, x, h_fd);
    CNCFactor f = cnc_polynomial(to_normal_frame(*field, s, E), inf);
    f.basepoint = x;
    auto zmap = std::make_shared<InverseExpTaylor>(*field, x, E);
    ConformalField gbar(field, [f, zmap](const Vec4& p) { return f.fbar((*zmap)(p)); });
    CNCResiduals r = residuals_at(gbar, x, E, h_fd);
    r.factor = f;
    return r;
}

}  // namespace cyl
