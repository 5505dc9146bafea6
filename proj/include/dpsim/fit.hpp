#ifndef DPSIM_FIT_HPP
#define DPSIM_FIT_HPP

#include <span>
#include <string>
#include <vector>

namespace dpsim {

/// Least-squares polynomial. coeffs[k] multiplies x^k.
struct PolyFit
{
    int degree = 1;
    std::vector<double> coeffs;
    double r2 = 0.0;

    double operator()(double x) const;
    /// e.g. "-0.0002X^2 + 0.1614X + 7.0096"
    std::string describe(int precision = 4) const;
};

/// Fits y over x. When x has too few distinct values for `degree`, the
/// unidentifiable high-order coefficients are reported as 0.
PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);

/// Fits y over x = 1, 2, ..., n.
PolyFit fit_polynomial(std::span<const double> y, int degree);

} // namespace dpsim

#endif
