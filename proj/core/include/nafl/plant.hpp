#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nafl/numerics.hpp"
#include "nafl/reference.hpp"

namespace nafl::plant {

struct JacobianPair {
    Matrix dv_du; ///< m x m
    Matrix dv_dx; ///< m x n
};

/**
 * A square (m outputs, m controls) plant
 *
 *   x' = f(x, u),  y = g(x),
 *
 * together with its differentiated-output map v(x, u), whose i-th entry is
 * the alpha_i-th time derivative of y_i, and the lower-derivative stack
 * [y_i, y_i', ..., y_i^(alpha_i - 1)] for every output. The stack is given
 * analytically so the controller never differentiates measurements.
 *
 * Immutable after construction; share it through shared_ptr<const>.
 */
class SystemModel {
public:
    using StateControlFn = std::function<Vector(const Vector& x, const Vector& u)>;
    using StateFn = std::function<Vector(const Vector& x)>;
    using JacobianFn = std::function<JacobianPair(const Vector& x, const Vector& u)>;

    struct Definition {
        std::string name;
        int n = 0;
        int m = 0;
        std::vector<int> alphas;
        StateControlFn dynamics;
        StateFn output;
        StateControlFn v_map;
        StateControlFn derivative_stack;
        JacobianFn analytic_jacobians; ///< optional
    };

    explicit SystemModel(Definition def);

    const std::string& name() const noexcept { return def_.name; }
    int state_dim() const noexcept { return def_.n; }
    int control_dim() const noexcept { return def_.m; }
    int output_dim() const noexcept { return def_.m; }
    std::span<const int> alphas() const noexcept { return def_.alphas; }
    /// Sum of relative degrees: the length of the tracking-error stack.
    int error_dim() const noexcept { return error_dim_; }
    /// Offset of output i's block inside the error / derivative stack.
    int block_offset(int output) const { return offsets_.at(static_cast<std::size_t>(output)); }

    Vector dynamics(const Vector& x, const Vector& u) const;
    Vector output(const Vector& x) const;
    Vector v(const Vector& x, const Vector& u) const;
    Vector derivative_stack(const Vector& x, const Vector& u) const;

    bool has_analytic_jacobians() const noexcept { return static_cast<bool>(def_.analytic_jacobians); }
    std::optional<JacobianPair> analytic_jacobians(const Vector& x, const Vector& u) const;

private:
    void check_state(const Vector& x) const;
    void check_control(const Vector& u) const;

    Definition def_;
    int error_dim_ = 0;
    std::vector<int> offsets_;
};

using ModelPtr = std::shared_ptr<const SystemModel>;

struct PlantInstance {
    ModelPtr model;
    Vector state;
    double time = 0.0;
};

Vector eval_v(const SystemModel& model, const Vector& x, const Vector& u);

/// Analytic Jacobians when the model has them, otherwise central differences of v.
JacobianPair jacobians(const SystemModel& model, const Vector& x, const Vector& u, double fd_step = 1e-6);

/// Same pair computed by central differences regardless of analytic availability.
JacobianPair finite_difference_jacobians(const SystemModel& model, const Vector& x, const Vector& u,
                                         double fd_step = 1e-6);

/// Tracking-error stack: blocks [y_i - y_ri, ..., y_i^(alpha_i - 1) - y_ri^(alpha_i - 1)].
Vector error_coordinates(const SystemModel& model, const Vector& x, const Vector& u, const ReferenceStack& ref);

/**
 * Time derivative of the tracking-error stack. Lower entries shift up the
 * stack; the top entry of each block is v_i(x, u) - y_ri^(alpha_i).
 */
Vector error_coordinate_rates(const SystemModel& model, const Vector& x, const Vector& u, const ReferenceStack& ref);

/// x' = -x + u + u^3, y = x. Non-affine, relative degree 1, dv/du = 1 + 3u^2 >= 1.
ModelPtr make_benchmark_scalar();

} // namespace nafl::plant
