#pragma once

#include "varibc/geometry.hpp"

#include <Eigen/Core>

#include <vector>

namespace varibc {

/// Index map of the flat design vector [rho | Xs | Ys | Xf Yf | theta].
struct DesignLayout {
    int num_rho = 0;
    int num_supports = 0;

    int size() const { return num_rho + 2 * num_supports + 3; }
    int rho(int j) const { return j; }
    int xs(int i) const { return num_rho + i; }
    int ys(int i) const { return num_rho + num_supports + i; }
    int xf() const { return num_rho + 2 * num_supports; }
    int yf() const { return xf() + 1; }
    int theta() const { return xf() + 2; }
    bool is_rho(int k) const { return k < num_rho; }
};

/// Element densities plus boundary-condition coordinates and actuator angle.
struct DesignVector {
    Eigen::VectorXd rho;          // one entry per designable element
    std::vector<Point> supports;  // (Xs, Ys) [m]
    Point load = Point::Zero();   // actuator (Xf, Yf) [m]
    double theta = 0.0;           // actuator angle [rad]

    DesignLayout layout() const {
        return {static_cast<int>(rho.size()), static_cast<int>(supports.size())};
    }
    Eigen::VectorXd flatten() const;
    static DesignVector unflatten(const Eigen::VectorXd& zeta, const DesignLayout& layout);

    /// Supports followed by the load point: the centers of the movable
    /// solid regions.
    std::vector<Point> bc_points() const;
};

}  // namespace varibc
