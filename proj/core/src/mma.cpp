#include "varibc/mma.hpp"

#include "varibc/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace varibc {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Separable convex subproblem of one MMA iteration.
struct Subproblem {
    int n, m;
    Vec low, upp, alfa, beta, p0, q0;
    Mat P, Q;  // m x n
    double a0;
    Vec b, c, d;  // a_i = 0
};

struct Point_ {
    Vec x, y, lam, xsi, eta, mu, s;
    double z, zet;
};

Vec residual(const Subproblem& sp, const Point_& v, double epsi) {
    const Vec ux1 = sp.upp - v.x, xl1 = v.x - sp.low;
    const Vec plam = sp.p0 + sp.P.transpose() * v.lam;
    const Vec qlam = sp.q0 + sp.Q.transpose() * v.lam;
    const Vec gvec = sp.P * ux1.cwiseInverse() + sp.Q * xl1.cwiseInverse();
    const Vec dpsidx = plam.cwiseQuotient(ux1.cwiseAbs2()) - qlam.cwiseQuotient(xl1.cwiseAbs2());
    const int n = sp.n, m = sp.m;
    Vec r(3 * n + 4 * m + 2);
    r.segment(0, n) = dpsidx - v.xsi + v.eta;
    r.segment(n, m) = sp.c + sp.d.cwiseProduct(v.y) - v.mu - v.lam;
    r[n + m] = sp.a0 - v.zet;
    r.segment(n + m + 1, m) = gvec - v.y + v.s - sp.b;
    r.segment(n + 2 * m + 1, n) = v.xsi.cwiseProduct(v.x - sp.alfa) - Vec::Constant(n, epsi);
    r.segment(2 * n + 2 * m + 1, n) = v.eta.cwiseProduct(sp.beta - v.x) - Vec::Constant(n, epsi);
    r.segment(3 * n + 2 * m + 1, m) = v.mu.cwiseProduct(v.y) - Vec::Constant(m, epsi);
    r[3 * n + 3 * m + 1] = v.zet * v.z - epsi;
    r.segment(3 * n + 3 * m + 2, m) = v.lam.cwiseProduct(v.s) - Vec::Constant(m, epsi);
    return r;
}

double max_ratio(const Vec& step, const Vec& base, double sign) {
    double r = -1e300;
    for (Eigen::Index i = 0; i < step.size(); ++i) r = std::max(r, sign * 1.01 * step[i] / base[i]);
    return r;
}

// Primal-dual interior point solve of the subproblem (Svanberg's subsolv).
Vec subsolve(const Subproblem& sp) {
    const int m = sp.m;
    Point_ v;
    v.x = 0.5 * (sp.alfa + sp.beta);
    v.y = Vec::Ones(m);
    v.z = 1.0;
    v.lam = Vec::Ones(m);
    v.xsi = (v.x - sp.alfa).cwiseInverse().cwiseMax(1.0);
    v.eta = (sp.beta - v.x).cwiseInverse().cwiseMax(1.0);
    v.mu = (0.5 * sp.c).cwiseMax(1.0);
    v.zet = 1.0;
    v.s = Vec::Ones(m);

    double epsi = 1.0;
    while (epsi > 1e-7) {
        Vec res = residual(sp, v, epsi);
        double resnorm = res.norm();
        double resmax = res.lpNorm<Eigen::Infinity>();
        int inner = 0;
        while (resmax > 0.9 * epsi && inner < 200) {
            ++inner;
            const Vec ux1 = sp.upp - v.x, xl1 = v.x - sp.low;
            const Vec ux2 = ux1.cwiseAbs2(), xl2 = xl1.cwiseAbs2();
            const Vec ux3 = ux1.cwiseProduct(ux2), xl3 = xl1.cwiseProduct(xl2);
            const Vec plam = sp.p0 + sp.P.transpose() * v.lam;
            const Vec qlam = sp.q0 + sp.Q.transpose() * v.lam;
            const Vec gvec = sp.P * ux1.cwiseInverse() + sp.Q * xl1.cwiseInverse();
            const Mat GG = sp.P * ux2.cwiseInverse().asDiagonal() - sp.Q * xl2.cwiseInverse().asDiagonal();
            const Vec dpsidx = plam.cwiseQuotient(ux2) - qlam.cwiseQuotient(xl2);
            const Vec delx = dpsidx - epsi * (v.x - sp.alfa).cwiseInverse() + epsi * (sp.beta - v.x).cwiseInverse();
            const Vec dely = sp.c + sp.d.cwiseProduct(v.y) - v.lam - epsi * v.y.cwiseInverse();
            const double delz = sp.a0 - epsi / v.z;
            const Vec dellam = gvec - v.y - sp.b + epsi * v.lam.cwiseInverse();
            const Vec diagx = 2.0 * (plam.cwiseQuotient(ux3) + qlam.cwiseQuotient(xl3)) +
                              v.xsi.cwiseQuotient(v.x - sp.alfa) + v.eta.cwiseQuotient(sp.beta - v.x);
            const Vec diagxinv = diagx.cwiseInverse();
            const Vec diagy = sp.d + v.mu.cwiseQuotient(v.y);
            const Vec diagyinv = diagy.cwiseInverse();
            const Vec diaglamyi = v.s.cwiseQuotient(v.lam) + diagyinv;

            // reduced (m+1) system; a_i = 0 decouples dz
            Vec dlam(m);
            if (m > 0) {
                const Vec blam = dellam + dely.cwiseQuotient(diagy) - GG * delx.cwiseProduct(diagxinv);
                Mat Alam = GG * diagxinv.asDiagonal() * GG.transpose();
                Alam.diagonal() += diaglamyi;
                dlam = Alam.ldlt().solve(blam);
            }
            const double dz = delz / (-v.zet / v.z);
            const Vec dx = -delx.cwiseProduct(diagxinv) - (GG.transpose() * dlam).cwiseProduct(diagxinv);
            const Vec dy = -dely.cwiseQuotient(diagy) + dlam.cwiseQuotient(diagy);
            const Vec dxsi = -v.xsi + epsi * (v.x - sp.alfa).cwiseInverse() -
                             v.xsi.cwiseProduct(dx).cwiseQuotient(v.x - sp.alfa);
            const Vec deta = -v.eta + epsi * (sp.beta - v.x).cwiseInverse() +
                             v.eta.cwiseProduct(dx).cwiseQuotient(sp.beta - v.x);
            const Vec dmu = -v.mu + epsi * v.y.cwiseInverse() - v.mu.cwiseProduct(dy).cwiseQuotient(v.y);
            const double dzet = -v.zet + epsi / v.z - v.zet * dz / v.z;
            const Vec ds = -v.s + epsi * v.lam.cwiseInverse() - v.s.cwiseProduct(dlam).cwiseQuotient(v.lam);

            double stm = std::max({max_ratio(dy, v.y, -1), -1.01 * dz / v.z, max_ratio(dlam, v.lam, -1),
                                   max_ratio(dxsi, v.xsi, -1), max_ratio(deta, v.eta, -1),
                                   max_ratio(dmu, v.mu, -1), -1.01 * dzet / v.zet, max_ratio(ds, v.s, -1),
                                   max_ratio(dx, v.x - sp.alfa, -1), max_ratio(dx, sp.beta - v.x, 1), 1.0});
            double steg = 1.0 / stm;

            const Point_ old = v;
            double resnew = 2.0 * resnorm;
            for (int it = 0; it < 50 && resnew > resnorm; ++it) {
                v.x = old.x + steg * dx;
                v.y = old.y + steg * dy;
                v.z = old.z + steg * dz;
                v.lam = old.lam + steg * dlam;
                v.xsi = old.xsi + steg * dxsi;
                v.eta = old.eta + steg * deta;
                v.mu = old.mu + steg * dmu;
                v.zet = old.zet + steg * dzet;
                v.s = old.s + steg * ds;
                res = residual(sp, v, epsi);
                resnew = res.norm();
                steg /= 2.0;
            }
            resnorm = resnew;
            resmax = res.lpNorm<Eigen::Infinity>();
            if (!std::isfinite(resnorm)) throw Error("MMA subproblem diverged");
        }
        epsi *= 0.1;
    }
    if (!v.x.allFinite()) throw Error("MMA subproblem produced non-finite values");
    return v.x;
}

}  // namespace

Mma::Mma(int n, int m, MmaSettings settings) : n_(n), m_(m), s_(settings) {
    if (n < 0 || m < 0) throw Error("MMA sizes must be non-negative");
}

Eigen::VectorXd Mma::update(const Eigen::VectorXd& x, const Eigen::VectorXd& df0dx, const Eigen::VectorXd& fval,
                            const Eigen::MatrixXd& dfdx, const Eigen::VectorXd& xmin,
                            const Eigen::VectorXd& xmax, const Eigen::VectorXd& move) {
    if (x.size() != n_ || df0dx.size() != n_ || fval.size() != m_ || dfdx.rows() != m_ || dfdx.cols() != n_)
        throw Error("MMA update: dimension mismatch");
    ++iter_;
    fallback_ = false;
    reason_.clear();
    const Vec range = (xmax - xmin).cwiseMax(1e-5);

    if (iter_ <= 2) {
        low_ = x - s_.asyinit * range;
        upp_ = x + s_.asyinit * range;
    } else {
        for (int j = 0; j < n_; ++j) {
            const double zzz = (x[j] - xold1_[j]) * (xold1_[j] - xold2_[j]);
            const double f = zzz > 0.0 ? s_.asyincr : (zzz < 0.0 ? s_.asydecr : 1.0);
            low_[j] = x[j] - f * (xold1_[j] - low_[j]);
            upp_[j] = x[j] + f * (upp_[j] - xold1_[j]);
            low_[j] = std::clamp(low_[j], x[j] - 10.0 * range[j], x[j] - 0.01 * range[j]);
            upp_[j] = std::clamp(upp_[j], x[j] + 0.01 * range[j], x[j] + 10.0 * range[j]);
        }
    }

    Subproblem sp;
    sp.n = n_;
    sp.m = m_;
    sp.low = low_;
    sp.upp = upp_;
    sp.alfa = (low_ + s_.albefa * (x - low_)).cwiseMax(x - move).cwiseMax(xmin);
    sp.beta = (upp_ - s_.albefa * (upp_ - x)).cwiseMin(x + move).cwiseMin(xmax);
    const Vec ux2 = (upp_ - x).cwiseAbs2(), xl2 = (x - low_).cwiseAbs2();
    const Vec rinv = range.cwiseInverse();
    Vec p0 = df0dx.cwiseMax(0.0), q0 = (-df0dx).cwiseMax(0.0);
    const Vec pq0 = 0.001 * (p0 + q0) + s_.raa0 * rinv;
    sp.p0 = (p0 + pq0).cwiseProduct(ux2);
    sp.q0 = (q0 + pq0).cwiseProduct(xl2);
    Mat P = dfdx.cwiseMax(0.0), Q = (-dfdx).cwiseMax(0.0);
    Mat PQ = 0.001 * (P + Q);
    PQ.rowwise() += s_.raa0 * rinv.transpose();
    sp.P = (P + PQ) * ux2.asDiagonal();
    sp.Q = (Q + PQ) * xl2.asDiagonal();
    sp.a0 = s_.a0;
    sp.b = sp.P * (upp_ - x).cwiseInverse() + sp.Q * (x - low_).cwiseInverse() - fval;
    sp.c = Vec::Constant(m_, s_.c);
    sp.d = Vec::Constant(m_, s_.d);

    Vec xnew;
    try {
        if (!df0dx.allFinite() || !fval.allFinite() || !dfdx.allFinite())
            throw Error("non-finite objective or constraint data");
        xnew = subsolve(sp);
    } catch (const Error& e) {
        // bound-projected steepest descent with half the move limit
        fallback_ = true;
        reason_ = e.what();
        xnew = x;
        for (int j = 0; j < n_; ++j) {
            const double g = df0dx[j];
            const double step = g > 0.0 ? -0.5 * move[j] : (g < 0.0 ? 0.5 * move[j] : 0.0);
            xnew[j] = std::clamp(x[j] + step, xmin[j], xmax[j]);
        }
    }
    // guard against round-off outside the box
    xnew = xnew.cwiseMax(xmin).cwiseMin(xmax).cwiseMax(x - move).cwiseMin(x + move);

    xold2_ = iter_ >= 2 ? xold1_ : x;
    xold1_ = x;
    return xnew;
}

}  // namespace varibc
