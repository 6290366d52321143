#pragma once

#include <vector>

namespace nafl {

/**
 * Reference values and time derivatives, per output channel.
 *
 * channel(i)[k] is the k-th time derivative of the i-th reference output.
 * Controllers need orders 0..alpha_i + 1 (the last one feeds z-dot).
 */
class ReferenceStack {
public:
    ReferenceStack() = default;
    explicit ReferenceStack(std::vector<std::vector<double>> channels);

    int outputs() const noexcept { return static_cast<int>(channels_.size()); }
    int orders(int output) const;

    /// Throws ErrorKind::Configuration when the requested order is missing.
    double derivative(int output, int order) const;

    const std::vector<double>& channel(int output) const;

private:
    std::vector<std::vector<double>> channels_;
};

} // namespace nafl
