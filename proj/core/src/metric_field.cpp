#include "cyl/metric_field.hpp"

#include <cmath>

#include "cyl/constants.hpp"
#include "cyl/normal_coords.hpp"

namespace cyl {

MetricJet MetricField::jet(const Vec4& x) const {
    const double h = fd_step();
    MetricJet j;
    j.g = metric(x);
    std::array<Mat4, 4> gp, gm;
    for (int k = 0; k < 4; ++k) {
        Vec4 e = Vec4::Zero();
        e(k) = h;
        gp[k] = metric(x + e);
        gm[k] = metric(x - e);
        j.dg[k] = (gp[k] - gm[k]) / (2 * h);
    }
    for (int k = 0; k < 4; ++k) {
        j.ddg[k][k] = (gp[k] - 2.0 * j.g + gm[k]) / (h * h);
        for (int l = k + 1; l < 4; ++l) {
            Vec4 a = Vec4::Zero(), b = Vec4::Zero();
            a(k) = h;
            b(l) = h;
            j.ddg[k][l] = (metric(x + a + b) - metric(x + a - b) - metric(x - a + b) + metric(x - a - b)) / (4 * h * h);
            j.ddg[l][k] = j.ddg[k][l];
        }
    }
    return j;
}

std::shared_ptr<const NormalChart> MetricField::exact_normal_chart(const Vec4&, const Vec4&) const { return nullptr; }

MetricJet FlatField::jet(const Vec4&) const {
    MetricJet j;
    j.g = Mat4::Identity();
    for (int k = 0; k < 4; ++k) {
        j.dg[k].setZero();
        for (int l = 0; l < 4; ++l) j.ddg[k][l].setZero();
    }
    return j;
}

std::shared_ptr<const NormalChart> FlatField::exact_normal_chart(const Vec4& x, const Vec4& first_axis) const {
    return std::make_shared<FlatNormalChart>(x, first_axis);
}

Mat4 RadialField::metric(const Vec4& x) const {
    const RadialCoeffs c = coeffs_(x.squaredNorm());
    return c.A * Mat4::Identity() + c.B * x * x.transpose();
}

MetricJet RadialField::jet(const Vec4& x) const {
    const RadialCoeffs c = coeffs_(x.squaredNorm());
    const Mat4 I = Mat4::Identity();
    const Mat4 xx = x * x.transpose();
    MetricJet j;
    j.g = c.A * I + c.B * xx;
    std::array<Mat4, 4> ex;  // e_k x^T + x e_k^T
    for (int k = 0; k < 4; ++k) {
        Vec4 e = Vec4::Zero();
        e(k) = 1.0;
        ex[k] = e * x.transpose() + x * e.transpose();
    }
    for (int k = 0; k < 4; ++k) j.dg[k] = 2 * c.A1 * x(k) * I + 2 * c.B1 * x(k) * xx + c.B * ex[k];
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            const double dkl = (k == l) ? 1.0 : 0.0;
            Mat4 eke = Mat4::Zero();
            eke(k, l) += 1.0;
            eke(l, k) += 1.0;
            j.ddg[k][l] = (2 * c.A1 * dkl + 4 * c.A2 * x(k) * x(l)) * I + (2 * c.B1 * dkl + 4 * c.B2 * x(k) * x(l)) * xx +
                          2 * c.B1 * x(k) * ex[l] + 2 * c.B1 * x(l) * ex[k] + c.B * eke;
        }
    return j;
}

void sphere_coeffs(double q, double out[6]) {
    // S(q) = sin^2 r / r^2 = sum (-1)^m 2^{2m+1} q^m/(2m+2)!
    // P(q) = (1 - S)/q     = sum (-1)^m 2^{2m+3} q^m/(2m+4)!
    constexpr int M = 48;
    static const auto coeffs = [] {
        std::array<std::array<double, M>, 2> a{};
        a[0][0] = 1.0;
        a[1][0] = 8.0 / 24.0;
        for (int m = 0; m + 1 < M; ++m) {
            a[0][m + 1] = a[0][m] * -4.0 / ((2.0 * m + 3.0) * (2.0 * m + 4.0));
            a[1][m + 1] = a[1][m] * -4.0 / ((2.0 * m + 5.0) * (2.0 * m + 6.0));
        }
        return a;
    }();
    for (int w = 0; w < 2; ++w) {
        double v = 0, d1 = 0, d2 = 0;
        for (int m = M - 1; m >= 0; --m) {
            d2 = d2 * q + 2.0 * d1;
            d1 = d1 * q + v;
            v = v * q + coeffs[w][m];
        }
        out[3 * w] = v;
        out[3 * w + 1] = d1;
        out[3 * w + 2] = d2;
    }
}

RoundSphereField::RoundSphereField(double radius)
    : RadialField(
          [](double q) {
              double c[6];
              sphere_coeffs(q, c);
              return RadialCoeffs{c[0], c[1], c[2], c[3], c[4], c[5]};
          },
          radius,
          Warp{[](double s) { return std::sin(s); }, [](double s) { return std::cos(s); },
               [](double s) { return -std::sin(s); }, [](double) { return 12.0; }, 1}) {
    if (!(radius > 0.0 && radius < pi)) throw InvalidParameter("round chart radius must lie in (0, pi)");
}

std::shared_ptr<const NormalChart> RoundSphereField::exact_normal_chart(const Vec4& x, const Vec4& first_axis) const {
    return std::make_shared<SphereNormalChart>(x, first_axis, radius_);
}

std::shared_ptr<RadialField> isotropic_cone_example(double radius) {
    Warp w{[](double s) { return s * std::sqrt(1 + s * s); },
           [](double s) { return (1 + 2 * s * s) / std::sqrt(1 + s * s); },
           [](double s) {
               const double u = 1 + s * s;
               return s * (2 * s * s + 3) / (u * std::sqrt(u));
           },
           [](double s) { return -36.0 / (1 + s * s); }, 2};
    return std::make_shared<RadialField>([](double q) { return RadialCoeffs{1 + q, 1, 0, -1, 0, 0}; }, radius, w);
}

Mat4 ConformalField::metric(const Vec4& x) const { return std::exp(F_(x).v) * base_->metric(x); }

MetricJet ConformalField::jet(const Vec4& x) const {
    const MetricJet b = base_->jet(x);
    const Jet2 F = F_(x);
    const double e = std::exp(F.v);
    MetricJet j;
    j.g = e * b.g;
    for (int k = 0; k < 4; ++k) j.dg[k] = e * (F.g(k) * b.g + b.dg[k]);
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
            j.ddg[k][l] = e * ((F.g(k) * F.g(l) + F.H(k, l)) * b.g + F.g(k) * b.dg[l] + F.g(l) * b.dg[k] + b.ddg[k][l]);
    return j;
}

Christoffel christoffel(const MetricJet& j) {
    const Mat4 gi = j.g.inverse();
    Christoffel c;
    // first kind: L_l(i,j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    std::array<Mat4, 4> L;
    for (int l = 0; l < 4; ++l)
        for (int i = 0; i < 4; ++i)
            for (int jj = 0; jj < 4; ++jj)
                L[l](i, jj) = 0.5 * (j.dg[i](jj, l) + j.dg[jj](i, l) - j.dg[l](i, jj));
    for (int k = 0; k < 4; ++k) {
        c.G[k].setZero();
        for (int l = 0; l < 4; ++l) c.G[k] += gi(k, l) * L[l];
    }
    for (int m = 0; m < 4; ++m) {
        const Mat4 dgi = -gi * j.dg[m] * gi;
        std::array<Mat4, 4> dL;
        for (int l = 0; l < 4; ++l)
            for (int i = 0; i < 4; ++i)
                for (int jj = 0; jj < 4; ++jj)
                    dL[l](i, jj) = 0.5 * (j.ddg[m][i](jj, l) + j.ddg[m][jj](i, l) - j.ddg[m][l](i, jj));
        for (int k = 0; k < 4; ++k) {
            c.dG[m][k].setZero();
            for (int l = 0; l < 4; ++l) c.dG[m][k] += dgi(k, l) * L[l] + gi(k, l) * dL[l];
        }
    }
    return c;
}

double laplacian(const MetricJet& j, const Vec4& grad, const Mat4& hess) {
    const Mat4 gi = j.g.inverse();
    const Christoffel c = christoffel(j);
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double v = hess(a, b);
            for (int k = 0; k < 4; ++k) v -= c.G[k](a, b) * grad(k);
            s += gi(a, b) * v;
        }
    return s;
}

}  // namespace cyl
