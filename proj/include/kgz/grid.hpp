#pragma once

#include <cstddef>

namespace kgz {

/// Uniform radial grid on [0, R] with N intervals.
///
/// Only the N-1 interior nodes r_j = j*dr (j = 1..N-1) carry data; the
/// reduced field w = r*f vanishes at both ends. Array index i maps to node
/// j = i + 1, and likewise spectral index i maps to frequency (i+1)*pi/R.
class RadialGrid {
public:
    /// Throws std::invalid_argument unless radius > 0 and n is a power of two >= 8.
    static RadialGrid make(double radius, std::size_t n);

    double radius() const { return radius_; }
    std::size_t intervals() const { return n_; }
    std::size_t size() const { return n_ - 1; }
    double dr() const { return radius_ / static_cast<double>(n_); }

    double node(std::size_t i) const { return static_cast<double>(i + 1) * dr(); }
    double frequency(std::size_t i) const;
    double max_frequency() const { return frequency(size() - 1); }

    bool operator==(const RadialGrid&) const = default;

private:
    RadialGrid(double radius, std::size_t n) : radius_(radius), n_(n) {}

    double radius_ = 1.0;
    std::size_t n_ = 8;
};

void require_same_grid(const RadialGrid& a, const RadialGrid& b);

}  // namespace kgz
