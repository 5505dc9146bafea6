#include "dpsim/crowds.hpp"

#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <numeric>

using namespace dpsim;
using namespace dpsim::crowds;

namespace {

std::vector<PeerId> crowd(std::uint32_t n)
{
    std::vector<PeerId> m;
    for (std::uint32_t i = 0; i < n; ++i)
        m.push_back(PeerId{i});
    return m;
}

} // namespace

TEST_CASE("blender keeps join order and rejects duplicates")
{
    Blender b;
    CHECK(b.register_member(PeerId{5}) == std::vector<PeerId>{PeerId{5}});
    for (std::uint32_t i = 1; i <= 6; ++i)
        if (i != 5)
            b.register_member(PeerId{i});
    const auto& all = b.register_member(PeerId{7});
    CHECK(all.size() == 7);
    CHECK(all.back() == PeerId{7});
    CHECK_THROWS_AS(b.register_member(PeerId{3}), ValidationError);

    Blender big;
    for (std::uint32_t i = 0; i < 1000; ++i)
        big.register_member(PeerId{999 - i});
    REQUIRE(big.members().size() == 1000);
    for (std::uint32_t i = 0; i < 1000; ++i)
        CHECK(big.members()[i] == PeerId{999 - i});
}

TEST_CASE("crowds config validation")
{
    CrowdsConfig c;
    c.forward_probability = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.forward_probability = 0.5;
    c.max_hops = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("never forwarding gives a single jondo")
{
    Rng rng(1);
    const auto members = crowd(20);
    CrowdsConfig cfg{0.0, 64};
    for (int i = 0; i < 200; ++i) {
        const auto r = route_request(rng, PeerId{0}, PeerId{1}, members, cfg);
        REQUIRE(r.hops.size() == 1);
        CHECK(r.hops[0] != PeerId{0});
        CHECK(r.hops[0] != PeerId{1});
    }
}

TEST_CASE("route length is capped at max_hops")
{
    Rng rng(2);
    const auto members = crowd(10);
    CrowdsConfig cfg{0.99, 10};
    std::size_t longest = 0;
    for (int i = 0; i < 2000; ++i)
        longest = std::max(longest, route_request(rng, PeerId{0}, PeerId{1}, members, cfg).hops.size());
    CHECK(longest == 10);
}

TEST_CASE("routing needs a jondo besides the endpoints")
{
    Rng rng(3);
    const std::vector<PeerId> only_endpoints{PeerId{0}, PeerId{1}};
    CHECK_THROWS_AS(route_request(rng, PeerId{0}, PeerId{1}, only_endpoints, {}), RoutingError);
    CHECK_THROWS_AS(route_request(rng, PeerId{0}, PeerId{1}, {}, {}), RoutingError);
}

TEST_CASE("identical seed and members give identical routes")
{
    const auto members = crowd(50);
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i)
        CHECK(route_request(a, PeerId{0}, PeerId{1}, members, {}).hops ==
              route_request(b, PeerId{0}, PeerId{1}, members, {}).hops);
}

TEST_CASE("reply retraces the route")
{
    CHECK(route_response({{PeerId{1}, PeerId{2}, PeerId{3}}}) == std::vector<PeerId>{PeerId{3}, PeerId{2}, PeerId{1}});
    CHECK(route_response({{PeerId{4}}}) == std::vector<PeerId>{PeerId{4}});
    Rng rng(4);
    const auto members = crowd(30);
    for (int i = 0; i < 100; ++i) {
        const auto r = route_request(rng, PeerId{0}, PeerId{1}, members, {});
        CHECK(route_response(r).size() == r.hops.size());
    }
}

TEST_CASE("route length follows the geometric law")
{
    // P(len = k) = (1-p) p^(k-1); mean 1/(1-p)
    const double p = 0.5;
    const int samples = 100000;
    Rng rng(12345);
    const auto members = crowd(100);
    CrowdsConfig cfg{p, 64};

    constexpr int kBins = 12; // lengths 1..11 and a tail bin
    std::vector<double> observed(kBins, 0.0);
    double total = 0.0;
    for (int i = 0; i < samples; ++i) {
        const auto len = route_request(rng, PeerId{0}, PeerId{1}, members, cfg).hops.size();
        total += static_cast<double>(len);
        observed[std::min<std::size_t>(len, kBins) - 1] += 1.0;
    }
    const double mean = total / samples;
    CHECK(std::fabs(mean - 1.0 / (1.0 - p)) / 2.0 < 0.02);

    double chi2 = 0.0, tail = 1.0;
    for (int k = 1; k <= kBins; ++k) {
        const double prob = k < kBins ? (1 - p) * std::pow(p, k - 1) : tail;
        tail -= prob;
        const double expected = prob * samples;
        chi2 += (observed[k - 1] - expected) * (observed[k - 1] - expected) / expected;
    }
    const boost::math::chi_squared dist(kBins - 1);
    CHECK(chi2 < boost::math::quantile(dist, 0.99));
}

TEST_CASE("route-length goodness of fit is calibrated across streams")
{
    // A correct sampler is rejected at the 1% level about 1% of the time.
    const double p = 0.5;
    const int streams = 100, samples = 20000;
    constexpr int kBins = 10;
    const auto members = crowd(50);
    const double critical = boost::math::quantile(boost::math::chi_squared(kBins - 1), 0.99);
    int rejected = 0;
    for (int s = 0; s < streams; ++s) {
        Rng rng(Rng::stream(777, {static_cast<std::uint64_t>(s)}));
        std::vector<double> observed(kBins, 0.0);
        for (int i = 0; i < samples; ++i) {
            const auto len = route_request(rng, PeerId{0}, PeerId{1}, members, {}).hops.size();
            observed[std::min<std::size_t>(len, kBins) - 1] += 1.0;
        }
        double chi2 = 0.0, tail = 1.0;
        for (int k = 1; k <= kBins; ++k) {
            const double prob = k < kBins ? (1 - p) * std::pow(p, k - 1) : tail;
            tail -= prob;
            const double expected = prob * samples;
            chi2 += (observed[k - 1] - expected) * (observed[k - 1] - expected) / expected;
        }
        rejected += chi2 > critical;
    }
    // Binomial(100, 0.01): P(X > 5) < 1e-3
    CHECK(rejected <= 5);
}
