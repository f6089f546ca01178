#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace cyl {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a numerical procedure cannot deliver a trustworthy value.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

class ChartBreakdown : public NumericalFailure {
public:
    explicit ChartBreakdown(const std::string& what) : NumericalFailure(what) {}
};

inline void require(bool ok, const char* msg) {
    if (!ok) throw InvalidParameter(msg);
}

}  // namespace cyl
