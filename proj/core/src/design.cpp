#include "varibc/design.hpp"

#include "varibc/errors.hpp"

namespace varibc {

Eigen::VectorXd DesignVector::flatten() const {
    const DesignLayout l = layout();
    Eigen::VectorXd z(l.size());
    z.head(l.num_rho) = rho;
    for (int i = 0; i < l.num_supports; ++i) {
        z[l.xs(i)] = supports[i].x();
        z[l.ys(i)] = supports[i].y();
    }
    z[l.xf()] = load.x();
    z[l.yf()] = load.y();
    z[l.theta()] = theta;
    return z;
}

DesignVector DesignVector::unflatten(const Eigen::VectorXd& z, const DesignLayout& l) {
    if (z.size() != l.size()) throw Error("design vector has wrong length");
    DesignVector d;
    d.rho = z.head(l.num_rho);
    d.supports.resize(l.num_supports);
    for (int i = 0; i < l.num_supports; ++i) d.supports[i] = Point(z[l.xs(i)], z[l.ys(i)]);
    d.load = Point(z[l.xf()], z[l.yf()]);
    d.theta = z[l.theta()];
    return d;
}

std::vector<Point> DesignVector::bc_points() const {
    std::vector<Point> pts = supports;
    pts.push_back(load);
    return pts;
}

}  // namespace varibc
