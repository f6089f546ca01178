#include "cyl/curvature.hpp"

#include <cmath>

namespace cyl {

PointCurvature curvature_from_jet(const MetricJet& j) {
    const Christoffel c = christoffel(j);
    PointCurvature p;
    p.g = j.g;
    // R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
    Tensor4 up{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int cc = 0; cc < 4; ++cc)
                for (int d = 0; d < 4; ++d) {
                    double v = c.dG[cc][a](d, b) - c.dG[d][a](cc, b);
                    for (int e = 0; e < 4; ++e) v += c.G[a](cc, e) * c.G[e](d, b) - c.G[a](d, e) * c.G[e](cc, b);
                    up[idx4(a, b, cc, d)] = v;
                }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int cc = 0; cc < 4; ++cc)
                for (int d = 0; d < 4; ++d) {
                    double v = 0;
                    for (int e = 0; e < 4; ++e) v += j.g(a, e) * up[idx4(e, b, cc, d)];
                    p.Rm[idx4(a, b, cc, d)] = v;
                }
    p.Ric.setZero();
    for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d)
            for (int a = 0; a < 4; ++a) p.Ric(b, d) += up[idx4(a, b, a, d)];
    p.R = (j.g.inverse() * p.Ric).trace();
    return p;
}

Tensor4 weyl_tensor(const Mat4& g, const Tensor4& Rm, const Mat4& Ric, double R) {
    Tensor4 W{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    const double kn = Ric(a, c) * g(b, d) - Ric(a, d) * g(b, c) + Ric(b, d) * g(a, c) - Ric(b, c) * g(a, d);
                    const double gg = g(a, c) * g(b, d) - g(a, d) * g(b, c);
                    W[idx4(a, b, c, d)] = Rm[idx4(a, b, c, d)] - 0.5 * kn + R / 6.0 * gg;
                }
    return W;
}

CurvatureSnapshot curvature_at(const MetricField& field, const Vec4& x, double h_fd) {
    if (!(h_fd > 0.0)) throw InvalidParameter("curvature step must be positive");
    const PointCurvature p = curvature_from_jet(field.jet(x));
    CurvatureSnapshot s;
    s.x = x;
    s.g = p.g;
    s.R = p.R;
    s.Ric = p.Ric;
    s.Rm = p.Rm;
    s.W = weyl_tensor(p.g, p.Rm, p.Ric, p.R);
    for (int k = 0; k < 4; ++k) {
        const Vec4 e = Vec4::Unit(k) * h_fd;
        const PointCurvature a = curvature_from_jet(field.jet(x + e));
        const PointCurvature b = curvature_from_jet(field.jet(x - e));
        s.dR(k) = (a.R - b.R) / (2 * h_fd);
        s.dRic[k] = (a.Ric - b.Ric) / (2 * h_fd);
    }
    return s;
}

CurvatureSnapshot to_normal_frame(const MetricField& field, const CurvatureSnapshot& s, const Mat4& E) {
    const Christoffel c = christoffel(field.jet(s.x));
    CurvatureSnapshot n;
    n.x = Vec4::Zero();
    n.g = E.transpose() * s.g * E;
    n.R = s.R;
    n.Ric = E.transpose() * s.Ric * E;
    n.dR = E.transpose() * s.dR;
    // nabla_k Ric_ij = d_k Ric_ij - G^m_ki Ric_mj - G^m_kj Ric_im
    std::array<Mat4, 4> cov;
    for (int k = 0; k < 4; ++k) {
        cov[k] = s.dRic[k];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int m = 0; m < 4; ++m)
                    cov[k](i, j) -= c.G[m](k, i) * s.Ric(m, j) + c.G[m](k, j) * s.Ric(i, m);
    }
    for (int a = 0; a < 4; ++a) {
        n.dRic[a].setZero();
        for (int k = 0; k < 4; ++k) n.dRic[a] += E(k, a) * (E.transpose() * cov[k] * E);
    }
    auto rot = [&](const Tensor4& T) {
        Tensor4 out{};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int cc = 0; cc < 4; ++cc)
                    for (int d = 0; d < 4; ++d) {
                        double v = 0;
                        for (int i = 0; i < 4; ++i)
                            for (int j = 0; j < 4; ++j)
                                for (int k = 0; k < 4; ++k)
                                    for (int l = 0; l < 4; ++l)
                                        v += E(i, a) * E(j, b) * E(k, cc) * E(l, d) * T[idx4(i, j, k, l)];
                        out[idx4(a, b, cc, d)] = v;
                    }
        return out;
    };
    n.Rm = rot(s.Rm);
    n.W = rot(s.W);
    return n;
}

IdentityDefects identity_defects(const CurvatureSnapshot& s) {
    IdentityDefects d{0, 0, 0};
    const Mat4 gi = s.g.inverse();
    for (int b = 0; b < 4; ++b)
        for (int dd = 0; dd < 4; ++dd) {
            double tr = 0;
            for (int a = 0; a < 4; ++a)
                for (int c = 0; c < 4; ++c) tr += gi(a, c) * s.W[idx4(a, b, c, dd)];
            d.weyl_trace = std::max(d.weyl_trace, std::abs(tr));
        }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int e = 0; e < 4; ++e)
                    d.bianchi = std::max(d.bianchi, std::abs(s.Rm[idx4(a, b, c, e)] + s.Rm[idx4(a, c, e, b)] +
                                                             s.Rm[idx4(a, e, b, c)]));
    d.ricci_symmetry = (s.Ric - s.Ric.transpose()).cwiseAbs().maxCoeff();
    return d;
}

}  // namespace cyl
