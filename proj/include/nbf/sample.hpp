#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbf {

// One group's observations. Values are on an arbitrary outcome scale;
// ties are meaningful and must be exact (no tolerance-based grouping).
struct Sample {
    std::vector<double> values;
    std::string label;
};

inline void require_finite(const std::vector<double>& values, const char* what) {
    if (values.empty()) {
        throw std::invalid_argument(std::string(what) + ": sample must not be empty");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": sample contains a non-finite value");
        }
    }
}

}  // namespace nbf
