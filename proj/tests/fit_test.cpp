#include "dpsim/fit.hpp"
#include "dpsim/random.hpp"
#include "dpsim/types.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace dpsim;

namespace {

std::vector<double> xs(int n)
{
    std::vector<double> x;
    for (int i = 1; i <= n; ++i)
        x.push_back(i);
    return x;
}

std::vector<double> poly(const std::vector<double>& x, std::vector<double> c) // lowest first
{
    std::vector<double> y;
    for (double v : x) {
        double s = 0.0, p = 1.0;
        for (double k : c)
            s += k * p, p *= v;
        y.push_back(s);
    }
    return y;
}

} // namespace

TEST_CASE("exact recovery of known polynomials")
{
    const auto x = xs(100);
    const std::vector<std::vector<double>> sets = {
        {5.2110, 0.0464}, {7.0096, 0.1614, -0.0002}, {0.0661, 0.0757, -0.0002}, {0.5352, 0.1064, -0.0003}};
    for (const auto& c : sets) {
        const int degree = static_cast<int>(c.size()) - 1;
        const auto f = fit_polynomial(x, poly(x, c), degree);
        REQUIRE(f.coeffs.size() == c.size());
        for (std::size_t k = 0; k < c.size(); ++k)
            CHECK(std::fabs(f.coeffs[k] - c[k]) <= 1e-9);
        CHECK(f.r2 == doctest::Approx(1.0));
    }
}

TEST_CASE("implicit x runs from one")
{
    const auto f = fit_polynomial(poly(xs(10), {2.0, 3.0}), 1);
    CHECK(f.coeffs[0] == doctest::Approx(2.0));
    CHECK(f.coeffs[1] == doctest::Approx(3.0));
    CHECK(f(4.0) == doctest::Approx(14.0));
}

TEST_CASE("describe renders highest power first")
{
    PolyFit f{2, {7.0096, 0.1614, -0.0002}, 1.0};
    CHECK(f.describe() == "-0.0002X^2 + 0.1614X + 7.0096");
    PolyFit g{1, {-5.2110, 0.0464}, 1.0};
    CHECK(g.describe() == "0.0464X - 5.2110");
}

TEST_CASE("constant series")
{
    const std::vector<double> y(20, 3.5);
    const auto f = fit_polynomial(y, 2);
    CHECK(f.coeffs[0] == doctest::Approx(3.5));
    CHECK(std::fabs(f.coeffs[1]) < 1e-9);
    CHECK(std::fabs(f.coeffs[2]) < 1e-9);
    CHECK(f.r2 == 1.0);
}

TEST_CASE("under-determined fits zero the high orders")
{
    const std::vector<double> x{1, 1, 2, 2};
    const std::vector<double> y{1, 1, 3, 3};
    const auto f = fit_polynomial(x, y, 2);
    CHECK(f.coeffs[2] == 0.0);
    CHECK(f.coeffs[1] == doctest::Approx(2.0));
    CHECK(f.coeffs[0] == doctest::Approx(-1.0));
}

TEST_CASE("bad input")
{
    const std::vector<double> a{1, 2, 3}, b{1, 2};
    CHECK_THROWS_AS(fit_polynomial(a, b, 1), ValidationError);
    CHECK_THROWS_AS(fit_polynomial(a, a, -1), ValidationError);
    CHECK_THROWS_AS(fit_polynomial(std::vector<double>{}, 1), ValidationError);
}

TEST_CASE("noisy quadratic stays within a few standard errors")
{
    Rng rng(31);
    const auto x = xs(200);
    auto y = poly(x, {10.0, 0.5, -0.001});
    const double sigma = 0.5;
    for (auto& v : y) {
        // sum of 12 uniforms, approximately normal
        double s = 0.0;
        for (int i = 0; i < 12; ++i)
            s += rng.uniform01();
        v += sigma * (s - 6.0);
    }
    const auto f = fit_polynomial(x, y, 2);
    // SE of the x^2 term for 200 evenly spaced points is ~ sigma * 2.4e-5
    CHECK(std::fabs(f.coeffs[2] + 0.001) < 4 * sigma * 2.4e-5);
    CHECK(std::fabs(f(100.0) - (10.0 + 50.0 - 10.0)) < 4 * sigma / std::sqrt(200.0) * 1.5);
    CHECK(f.r2 > 0.99);
}
