#include "dpsim/fit.hpp"

#include "dpsim/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace dpsim {

double PolyFit::operator()(double x) const
{
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

std::string PolyFit::describe(int precision) const
{
    std::string out;
    char buf[64];
    for (int k = degree; k >= 0; --k) {
        const double c = coeffs[static_cast<std::size_t>(k)];
        if (out.empty())
            std::snprintf(buf, sizeof buf, "%.*f", precision, c);
        else
            std::snprintf(buf, sizeof buf, " %c %.*f", c < 0 ? '-' : '+', precision, std::fabs(c));
        out += buf;
        if (k >= 2)
            out += "X^" + std::to_string(k);
        else if (k == 1)
            out += "X";
    }
    return out;
}

PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree)
{
    if (degree < 0)
        throw ValidationError("degree must be >= 0");
    if (x.size() != y.size())
        throw ValidationError("x and y differ in length");
    if (y.size() <= static_cast<std::size_t>(degree))
        throw ValidationError("need more than " + std::to_string(degree) + " points for a degree-" +
                              std::to_string(degree) + " fit");

    // only as many terms as distinct abscissae can be identified
    const auto distinct = std::set<double>(x.begin(), x.end()).size();
    const int usable = std::min(degree, static_cast<int>(distinct) - 1);

    // centre and scale x for conditioning, then expand back to monomials
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    const double mid = 0.5 * (lo + hi);
    const double half = hi > lo ? 0.5 * (hi - lo) : 1.0;

    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXd a(n, usable + 1);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = (x[static_cast<std::size_t>(i)] - mid) / half;
        double p = 1.0;
        for (int k = 0; k <= usable; ++k, p *= u)
            a(i, k) = p;
        b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);

    // sum_k c_k ((x - mid)/half)^k  ->  sum_j coeffs_j x^j
    PolyFit fit;
    fit.degree = degree;
    fit.coeffs.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    for (int k = 0; k <= usable; ++k) {
        const double scale = c(k) / std::pow(half, k);
        double binom = 1.0;
        for (int j = 0; j <= k; ++j) {
            // binomial(k, j) * x^j * (-mid)^(k-j)
            fit.coeffs[static_cast<std::size_t>(j)] += scale * binom * std::pow(-mid, k - j);
            binom = binom * (k - j) / (j + 1);
        }
    }

    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - fit(x[i]);
        ss_res += r * r;
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    // a constant series is explained perfectly by its constant fit
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res <= 1e-18 * static_cast<double>(y.size()) ? 1.0 : 0.0);
    return fit;
}

PolyFit fit_polynomial(std::span<const double> y, int degree)
{
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = static_cast<double>(i + 1);
    return fit_polynomial(x, y, degree);
}

} // namespace dpsim
