#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace cocyclelab {

// Real 2x2 matrix, rows [a b; c d].  Cocycle values are unit-determinant;
// the closed-form singular value below is valid for any real 2x2 matrix.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static Mat2 identity() { return {}; }
    static Mat2 diagonal(double x, double y) { return {x, 0.0, 0.0, y}; }
    static Mat2 rotation(double angle) {
        const double co = std::cos(angle), si = std::sin(angle);
        return {co, -si, si, co};
    }
    // Transfer-matrix building block [[g, -1], [1, 0]]; det == 1 identically.
    static Mat2 transfer(double g) { return {g, -1.0, 1.0, 0.0}; }

    double det() const { return a * d - b * c; }
    double frobenius_sq() const { return a * a + b * b + c * c + d * d; }

    // Largest singular value:  sigma1^2 = (p + sqrt(p^2 - 4 q^2)) / 2,
    // p = |A|_F^2, q = det A.  The radicand is clamped at 0 to absorb the
    // rounding when sigma1 == sigma2 (rotations).
    double spectral_norm_sq() const {
        const double p = frobenius_sq();
        const double q = det();
        const double disc = std::max(p * p - 4.0 * q * q, 0.0);
        return 0.5 * (p + std::sqrt(disc));
    }
    double spectral_norm() const { return std::sqrt(spectral_norm_sq()); }
    double log_spectral_norm() const { return 0.5 * std::log(spectral_norm_sq()); }

    // Smallest singular value, via sigma1 * sigma2 = |det|.
    double smallest_singular_value() const {
        const double s1 = spectral_norm();
        return s1 > 0.0 ? std::abs(det()) / s1 : 0.0;
    }

    // Adjugate; exact inverse for det == 1.
    Mat2 inverse_unimodular() const { return {d, -b, -c, a}; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 scaled(double s) const { return {s * a, s * b, s * c, s * d}; }

    std::array<double, 2> apply(double x, double y) const {
        return {a * x + b * y, c * x + d * y};
    }

    double max_abs_entry() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }
    double entrywise_distance(const Mat2& o) const { return (*this - o).max_abs_entry(); }
};

inline Mat2 operator*(double s, const Mat2& m) { return m.scaled(s); }

// Running product e^{log_scale} * m kept away from overflow: the matrix part
// is renormalized by its spectral norm every 32 steps and whenever the
// entries get large.  log-norm and log-det of the true product stay exact up
// to the scalar-factor roundoff.
class ScaledMat2 {
public:
    ScaledMat2() = default;
    explicit ScaledMat2(const Mat2& m) : m_(m) {}

    // Accumulates s * current (cocycle products grow on the left).
    void multiply_left(const Mat2& s) {
        m_ = s * m_;
        if (++steps_ % 32 == 0 || m_.frobenius_sq() > 1e120) renormalize();
    }

    double log_norm() const { return log_scale_ + m_.log_spectral_norm(); }
    double log_abs_det() const { return 2.0 * log_scale_ + std::log(std::abs(m_.det())); }
    double log_scale() const { return log_scale_; }
    const Mat2& matrix_part() const { return m_; }

    // Materializes the product; overflows to inf when log_norm() is large.
    Mat2 to_mat2() const { return std::exp(log_scale_) * m_; }

    void renormalize() {
        const double s = m_.spectral_norm();
        if (s > 0.0 && std::isfinite(s)) {
            m_ = (1.0 / s) * m_;
            log_scale_ += std::log(s);
        }
    }

private:
    Mat2 m_ = Mat2::identity();
    double log_scale_ = 0.0;
    long steps_ = 0;
};

}  // namespace cocyclelab
