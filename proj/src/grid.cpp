#include "kgz/grid.hpp"

#include <bit>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kgz {

RadialGrid RadialGrid::make(double radius, std::size_t n) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("grid radius must be positive, got " + std::to_string(radius));
    }
    if (n < 8 || !std::has_single_bit(n)) {
        throw std::invalid_argument("grid size N must be a power of two >= 8, got " +
                                    std::to_string(n));
    }
    return RadialGrid(radius, n);
}

double RadialGrid::frequency(std::size_t i) const {
    return static_cast<double>(i + 1) * std::numbers::pi / radius_;
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b) {
    if (!(a == b)) {
        throw std::invalid_argument("fields live on different grids");
    }
}

}  // namespace kgz
