// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_NUMERIC_HPP
#define CEDONUT_NUMERIC_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <span>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>

namespace cedonut {

using complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double e = std::numbers::e;

/// Wraps an angle into the half-open interval [-pi, pi).
inline double wrap_angle(double angle)
{
    double wrapped = std::fmod(angle + pi, two_pi);
    if (wrapped < 0.0) wrapped += two_pi;
    wrapped -= pi;
    // fmod can land exactly on +pi after the shift for inputs a hair below -pi
    if (wrapped >= pi) wrapped -= two_pi;
    return wrapped;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

/// Neumaier-compensated running sum. Summation order is the caller's, so results
/// are reproducible whenever the order is fixed.
class CompensatedSum {
public:
    void add(double value)
    {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            compensation_ += (sum_ - t) + value;
        else
            compensation_ += (value - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

/// Sample mean and standard error of the mean.
struct MeanEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;
};

inline MeanEstimate mean_and_stderr(std::span<const double> values)
{
    MeanEstimate out;
    if (values.empty()) return out;
    CompensatedSum sum;
    for (double v : values) sum.add(v);
    const double n = static_cast<double>(values.size());
    out.mean = sum.value() / n;
    if (values.size() > 1) {
        CompensatedSum sq;
        for (double v : values) sq.add((v - out.mean) * (v - out.mean));
        out.stderr_mean = std::sqrt(sq.value() / (n - 1.0) / n);
    }
    return out;
}

/// Exponentially scaled modified Bessel function exp(-x) I0(x), x >= 0.
inline double bessel_i0_scaled(double x)
{
    if (x < 600.0) return std::exp(-x) * boost::math::cyl_bessel_i(0, x);
    // Hankel asymptotic expansion; relative error below 1e-13 in this range.
    const double t = 1.0 / (8.0 * x);
    const double series = 1.0 + t * (1.0 + t * (4.5 + t * (37.5 + t * 459.375)));
    return series / std::sqrt(two_pi * x);
}

/// Composite Gauss-Legendre rule: [a, b] split into equal panels no wider than
/// `panel_width`, each integrated with a fixed 16-point rule.
template <class F>
double integrate_panels(F&& f, double a, double b, double panel_width)
{
    if (!(b > a)) return 0.0;
    const auto panels = static_cast<int>(std::ceil((b - a) / panel_width));
    const double width = (b - a) / panels;
    CompensatedSum total;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        total.add(boost::math::quadrature::gauss<double, 16>::integrate(f, lo, lo + width));
    }
    return total.value();
}

} // namespace cedonut

#endif // CEDONUT_NUMERIC_HPP
