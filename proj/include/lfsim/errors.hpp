#pragma once

#include <stdexcept>
#include <string>

namespace lfsim {

// Leader center coincides with (or is too close to) the follower front point;
// the relative dynamics divide by the pair distance.
struct DegenerateGeometry : std::runtime_error {
    explicit DegenerateGeometry(const std::string& what) : std::runtime_error(what) {}
};

// QP cost matrix is not (numerically) symmetric positive definite.
struct IllConditioned : std::runtime_error {
    explicit IllConditioned(const std::string& what) : std::runtime_error(what) {}
};

// Sigma clipping discarded every pixel in the patch.
struct AllClipped : std::runtime_error {
    explicit AllClipped(const std::string& what) : std::runtime_error(what) {}
};

// class_center asked for the "leader not visible" label.
struct OutOfFovLabel : std::runtime_error {
    explicit OutOfFovLabel(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lfsim
