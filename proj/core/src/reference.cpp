#include "nafl/reference.hpp"

#include <cmath>
#include <string>

#include "nafl/error.hpp"

namespace nafl {

ReferenceStack::ReferenceStack(std::vector<std::vector<double>> channels) : channels_(std::move(channels)) {
    for (const auto& ch : channels_) {
        for (double v : ch) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::InvalidInput, "reference stack contains a non-finite value");
            }
        }
    }
}

int ReferenceStack::orders(int output) const {
    return static_cast<int>(channel(output).size());
}

const std::vector<double>& ReferenceStack::channel(int output) const {
    if (output < 0 || output >= outputs()) {
        throw Error(ErrorKind::Configuration, "reference has no output channel " + std::to_string(output));
    }
    return channels_[static_cast<std::size_t>(output)];
}

double ReferenceStack::derivative(int output, int order) const {
    const auto& ch = channel(output);
    if (order < 0 || order >= static_cast<int>(ch.size())) {
        throw Error(ErrorKind::Configuration, "reference output " + std::to_string(output) +
                                                  " does not provide derivative order " + std::to_string(order));
    }
    return ch[static_cast<std::size_t>(order)];
}

} // namespace nafl
