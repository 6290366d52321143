#include "nafl/plant.hpp"

#include <numeric>
#include <string>

#include "nafl/error.hpp"

namespace nafl::plant {

namespace {

void require_dim(const Vector& v, Eigen::Index expected, const char* what, const std::string& model) {
    if (v.size() != expected) {
        throw Error(ErrorKind::Shape, model + ": " + what + " has dimension " + std::to_string(v.size()) +
                                          ", expected " + std::to_string(expected));
    }
}

} // namespace

SystemModel::SystemModel(Definition def) : def_(std::move(def)) {
    if (def_.n < 1 || def_.m < 1) {
        throw Error(ErrorKind::Configuration, def_.name + ": state and control dimensions must be >= 1");
    }
    if (static_cast<int>(def_.alphas.size()) != def_.m) {
        throw Error(ErrorKind::Configuration, def_.name + ": need one relative degree per output");
    }
    for (int a : def_.alphas) {
        if (a < 1) {
            throw Error(ErrorKind::Configuration, def_.name + ": relative degrees must be >= 1");
        }
    }
    error_dim_ = std::accumulate(def_.alphas.begin(), def_.alphas.end(), 0);
    if (error_dim_ > def_.n) {
        throw Error(ErrorKind::Configuration, def_.name + ": sum of relative degrees exceeds state dimension");
    }
    if (!def_.dynamics || !def_.output || !def_.v_map || !def_.derivative_stack) {
        throw Error(ErrorKind::Configuration, def_.name + ": dynamics, output, v_map and derivative_stack are required");
    }
    offsets_.reserve(def_.alphas.size());
    int offset = 0;
    for (int a : def_.alphas) {
        offsets_.push_back(offset);
        offset += a;
    }
}

void SystemModel::check_state(const Vector& x) const {
    require_dim(x, def_.n, "state", def_.name);
}

void SystemModel::check_control(const Vector& u) const {
    require_dim(u, def_.m, "control", def_.name);
}

Vector SystemModel::dynamics(const Vector& x, const Vector& u) const {
    check_state(x);
    check_control(u);
    return def_.dynamics(x, u);
}

Vector SystemModel::output(const Vector& x) const {
    check_state(x);
    return def_.output(x);
}

Vector SystemModel::v(const Vector& x, const Vector& u) const {
    check_state(x);
    check_control(u);
    return def_.v_map(x, u);
}

Vector SystemModel::derivative_stack(const Vector& x, const Vector& u) const {
    check_state(x);
    check_control(u);
    return def_.derivative_stack(x, u);
}

std::optional<JacobianPair> SystemModel::analytic_jacobians(const Vector& x, const Vector& u) const {
    if (!def_.analytic_jacobians) {
        return std::nullopt;
    }
    check_state(x);
    check_control(u);
    return def_.analytic_jacobians(x, u);
}

Vector eval_v(const SystemModel& model, const Vector& x, const Vector& u) {
    return model.v(x, u);
}

JacobianPair finite_difference_jacobians(const SystemModel& model, const Vector& x, const Vector& u, double fd_step) {
    JacobianPair out;
    out.dv_du = numerics::finite_diff_jacobian([&](const Vector& uu) { return model.v(x, uu); }, u, fd_step);
    out.dv_dx = numerics::finite_diff_jacobian([&](const Vector& xx) { return model.v(xx, u); }, x, fd_step);
    return out;
}

JacobianPair jacobians(const SystemModel& model, const Vector& x, const Vector& u, double fd_step) {
    if (auto analytic = model.analytic_jacobians(x, u)) {
        if (!analytic->dv_du.allFinite() || !analytic->dv_dx.allFinite()) {
            throw Error(ErrorKind::Evaluation, model.name() + ": analytic Jacobian is non-finite");
        }
        return *analytic;
    }
    return finite_difference_jacobians(model, x, u, fd_step);
}

Vector error_coordinates(const SystemModel& model, const Vector& x, const Vector& u, const ReferenceStack& ref) {
    const Vector stack = model.derivative_stack(x, u);
    require_dim(stack, model.error_dim(), "derivative stack", model.name());
    if (ref.outputs() != model.output_dim()) {
        throw Error(ErrorKind::Configuration, model.name() + ": reference has " + std::to_string(ref.outputs()) +
                                                  " outputs, plant has " + std::to_string(model.output_dim()));
    }
    Vector e(model.error_dim());
    for (int i = 0; i < model.output_dim(); ++i) {
        const int off = model.block_offset(i);
        for (int k = 0; k < model.alphas()[static_cast<std::size_t>(i)]; ++k) {
            e(off + k) = stack(off + k) - ref.derivative(i, k);
        }
    }
    return e;
}

Vector error_coordinate_rates(const SystemModel& model, const Vector& x, const Vector& u, const ReferenceStack& ref) {
    const Vector e = error_coordinates(model, x, u, ref);
    const Vector v = model.v(x, u);
    Vector rates(model.error_dim());
    for (int i = 0; i < model.output_dim(); ++i) {
        const int off = model.block_offset(i);
        const int alpha = model.alphas()[static_cast<std::size_t>(i)];
        for (int k = 0; k + 1 < alpha; ++k) {
            rates(off + k) = e(off + k + 1);
        }
        rates(off + alpha - 1) = v(i) - ref.derivative(i, alpha);
    }
    return rates;
}

ModelPtr make_benchmark_scalar() {
    SystemModel::Definition def;
    def.name = "benchmark-scalar";
    def.n = 1;
    def.m = 1;
    def.alphas = {1};
    def.dynamics = [](const Vector& x, const Vector& u) {
        Vector d(1);
        d(0) = -x(0) + u(0) + u(0) * u(0) * u(0);
        return d;
    };
    def.output = [](const Vector& x) { return x; };
    def.v_map = def.dynamics;
    def.derivative_stack = [](const Vector& x, const Vector&) { return x; };
    def.analytic_jacobians = [](const Vector&, const Vector& u) {
        JacobianPair j;
        j.dv_du = Matrix::Constant(1, 1, 1.0 + 3.0 * u(0) * u(0));
        j.dv_dx = Matrix::Constant(1, 1, -1.0);
        return j;
    };
    return std::make_shared<const SystemModel>(std::move(def));
}

} // namespace nafl::plant
