#pragma once

// Exact azimuthal flow on the annular sector used for convergence studies.
//
// The radial profile U solves U'' + U'/r - U/r^2 = alpha/r with no-slip
// U(r1) = U(r2) = 0, giving the velocity u = U(r) e^{-t} (sin th, -cos th).
// The static pressure is linear in the angle, p = p0(th) e^{-t} with
// p0(theta1) = p_in and p0(theta2) = p_out, which is exactly the profile that
// balances the viscous term: -lap(u) + grad(p) = 0, so the body force reduces
// to f = du/dt + (u . grad)u. The total pressure adds the kinetic part |u|^2/2.

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "tpns/errors.hpp"
#include "tpns/fem.hpp"

namespace tpns {

class SectorProblem {
public:
    SectorProblem(double r1, double r2, double theta1, double theta2, double p_in, double p_out)
        : r1_(r1), r2_(r2), theta1_(theta1), theta2_(theta2), p_in_(p_in), p_out_(p_out) {
        if (!(r1 > 0.0) || !(r2 > r1)) throw config_error("manufactured: need 0 < r1 < r2");
        if (!(theta2 > theta1)) throw config_error("manufactured: need theta1 < theta2");
        alpha_ = (p_in - p_out) / (theta2 - theta1);
        const double lr = std::log(r2) - std::log(r1);
        C_ = 0.5 * r1 * r1 * r2 * r2 * lr / (r2 * r2 - r1 * r1);
        D_ = -0.5 * (r2 * r2 * std::log(r2) - r1 * r1 * std::log(r1)) / (r2 * r2 - r1 * r1);
    }

    double r1() const { return r1_; }
    double r2() const { return r2_; }
    double theta1() const { return theta1_; }
    double theta2() const { return theta2_; }
    double p_in() const { return p_in_; }
    double p_out() const { return p_out_; }
    double alpha() const { return alpha_; }
    double C() const { return C_; }
    double D() const { return D_; }

    // Radial velocity profile; vanishes at both walls by construction of C, D.
    double U(double r) const {
        if (!(r > 0.0)) throw config_error("manufactured: U(r) needs r > 0");
        return alpha_ * (0.5 * r * std::log(r) + C_ / r + D_ * r);
    }

    // Angular pressure profile: p_in at theta1 decaying linearly to p_out at
    // theta2, so the flow runs from the high-pressure side to the low one.
    double p0(double theta) const {
        return (p_in_ * (theta2_ - theta) + p_out_ * (theta - theta1_)) / (theta2_ - theta1_);
    }

    Vec2 exact_velocity(double x, double y, double t) const {
        const auto [r, th] = polar(x, y);
        const double u = U(r) * std::exp(-t);
        return {u * std::sin(th), -u * std::cos(th)};
    }

    double exact_static_pressure(double x, double y, double t) const {
        const auto [r, th] = polar(x, y);
        (void)r;
        return p0(th) * std::exp(-t);
    }

    double exact_total_pressure(double x, double y, double t) const {
        const auto [r, th] = polar(x, y);
        const double u = U(r) * std::exp(-t);
        return p0(th) * std::exp(-t) + 0.5 * u * u;
    }

    // Body force f = du/dt + (u . grad)u: the time-derivative part plus the
    // centripetal acceleration of the circular streamlines.
    Vec2 forcing_f(double x, double y, double t) const {
        const auto [r, th] = polar(x, y);
        const double u = U(r);
        const double e1 = std::exp(-t), e2 = std::exp(-2.0 * t);
        return {-u * u / r * e2 * std::cos(th) - u * e1 * std::sin(th),
                -u * u / r * e2 * std::sin(th) + u * e1 * std::cos(th)};
    }

    double boundary_pb(double x, double y, double t) const { return exact_total_pressure(x, y, t); }

    Vec2 initial_u0(double x, double y) const { return exact_velocity(x, y, 0.0); }

    std::function<Vec2(double, double, double)> forcing_fn() const {
        return [*this](double x, double y, double t) { return forcing_f(x, y, t); };
    }
    std::function<double(double, double, double)> boundary_pb_fn() const {
        return [*this](double x, double y, double t) { return boundary_pb(x, y, t); };
    }
    std::function<Vec2(double, double, double)> velocity_fn() const {
        return [*this](double x, double y, double t) { return exact_velocity(x, y, t); };
    }
    std::function<double(double, double, double)> total_pressure_fn() const {
        return [*this](double x, double y, double t) { return exact_total_pressure(x, y, t); };
    }
    std::function<Vec2(double, double, double)> initial_u0_fn() const {
        return [*this](double x, double y, double) { return initial_u0(x, y); };
    }

private:
    static std::array<double, 2> polar(double x, double y) {
        const double r = std::hypot(x, y);
        if (!(r > 0.0)) throw config_error("manufactured: fields are undefined at the origin");
        return {r, std::atan2(y, x)};
    }

    double r1_, r2_, theta1_, theta2_, p_in_, p_out_;
    double alpha_, C_, D_;
};

}  // namespace tpns
