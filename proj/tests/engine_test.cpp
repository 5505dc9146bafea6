#include "dpsim/engine.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>
#include <sstream>

using namespace dpsim;
using namespace dpsim::sim;

TEST_CASE("hop delay is linear in payload plus sender traffic")
{
    const CostModel c;
    CHECK(hop_delay(1.0, NodeState{PeerId{3}, true, 0.0}, c) == doctest::Approx(1.92));
    CHECK(hop_delay(0.0, NodeState{PeerId{3}, true, 0.0}, c) == 0.0);
    CHECK(hop_delay(5.0, NodeState{PeerId{3}, true, 10.1}, c) == doctest::Approx(19.7));
    CHECK_THROWS_AS(hop_delay(-1.0, NodeState{}, c), ValidationError);
}

TEST_CASE("crypto costs per KB")
{
    const CostModel c;
    CHECK(crypto_cost(CryptoOp::seal, 1.0, c) == doctest::Approx(0.8));
    CHECK(crypto_cost(CryptoOp::open, 1.0, c) == doctest::Approx(9.3));
    CHECK(crypto_cost(CryptoOp::open, 10.0, c) == doctest::Approx(93.0));
    CHECK(crypto_cost(CryptoOp::seal, 0.0, c) == 0.0);
}

TEST_CASE("failure sampling hits the drop ratio and spares endpoints")
{
    Rng rng(21);
    std::vector<NodeState> nodes(1000);
    for (std::uint32_t i = 0; i < nodes.size(); ++i)
        nodes[i].id = PeerId{i};
    const PeerId exempt[] = {kRequester, kProvider};
    long down = 0, total = 0;
    for (int r = 0; r < 100; ++r) {
        sample_failures(rng, nodes, 0.4, exempt);
        CHECK(nodes[0].up);
        CHECK(nodes[1].up);
        for (std::size_t i = 2; i < nodes.size(); ++i)
            down += !nodes[i].up, ++total;
    }
    CHECK(std::fabs(double(down) / total - 0.4) < 0.01 * 0.4);

    sample_failures(rng, nodes, 0.0, exempt);
    for (const auto& n : nodes)
        CHECK(n.up);
}

TEST_CASE("traffic sampling mean and range")
{
    Rng rng(22);
    std::vector<NodeState> nodes(2000);
    for (std::uint32_t i = 0; i < nodes.size(); ++i)
        nodes[i].id = PeerId{i};
    const PeerId exempt[] = {kRequester, kProvider};
    sample_traffic(rng, nodes, 50.0, 2.0, 3.0, exempt);
    CHECK(nodes[0].extra_delay_ms == 0.0);
    CHECK(nodes[1].extra_delay_ms == 0.0);
    double sum = 0.0;
    for (std::size_t i = 2; i < nodes.size(); ++i) {
        CHECK(nodes[i].extra_delay_ms >= 0.0);
        CHECK(nodes[i].extra_delay_ms <= 300.0);
        sum += nodes[i].extra_delay_ms;
    }
    // uniform(0, 300): mean 150, sd of the mean ~ 86.6/sqrt(1998)
    CHECK(std::fabs(sum / 1998 - 150.0) < 4 * 86.6 / std::sqrt(1998.0));
}

TEST_CASE("crowds transaction counts one transmission per sender each way")
{
    auto net = Network::idle(10);
    net.nodes[5].extra_delay_ms = 7.0;
    crowds::CrowdsRoute route{{PeerId{5}, PeerId{6}}};
    CostLedger ledger;
    const double d = crowds_transaction(route, kRequester, kProvider, 2.0, net, false, &ledger);
    CHECK(d == doctest::Approx(6 * 2 * 1.92 + 2 * 7.0));
    CHECK(ledger.total() == doctest::Approx(d));
    CHECK(ledger.terms().size() == 6);
    const double with_crypto = crowds_transaction(route, kRequester, kProvider, 2.0, net, true);
    CHECK(with_crypto == doctest::Approx(d + 6 * 2 * (0.8 + 9.3)));
}

TEST_CASE("static crowds mean matches the closed form")
{
    SimConfig cfg;
    cfg.reps = 20000;
    cfg.ticks = 1;
    cfg.base_traffic = 40.0;
    cfg.threads = 1;
    const auto sched = static_schedule(cfg);
    const auto s = run_timeseries(Protocol::crowds, sched, cfg, 9);
    REQUIRE(s.size() == 1);
    // E[jondos] = 1/(1-p) = 2; the route carries 2(k+1) transmissions and
    // every jondo sends twice at mean traffic m.
    const double ek = 2.0, m = 40.0;
    const double expect = 2 * (ek + 1) * 1.92 + 2 * ek * m;
    CHECK(std::fabs(s[0].mean_ms - expect) < 0.02 * expect);
    CHECK(s[0].aborted == 0);
}

TEST_CASE("idle dual-path mean equals the nominal cycle")
{
    SimConfig cfg;
    cfg.reps = 200;
    cfg.ticks = 3;
    cfg.base_traffic = 0.0;
    cfg.threads = 1;
    const auto s = run_timeseries(Protocol::dualpath, static_schedule(cfg), cfg);
    for (const auto& t : s) {
        CHECK(t.mean_ms == doctest::Approx(96.16));
        CHECK(t.std_error_ms == doctest::Approx(0.0));
        CHECK(t.failed == 0);
    }
}

TEST_CASE("runs are deterministic and independent of thread count")
{
    SimConfig cfg;
    cfg.reps = 100;
    cfg.ticks = 6;
    cfg.performance_failures = true;
    std::vector<TickParams> sched = static_schedule(cfg);
    for (auto& t : sched)
        t.drop_ratio = 0.3;
    cfg.threads = 1;
    const auto a = run_paired(sched, cfg, 4);
    cfg.threads = 3;
    const auto b = run_paired(sched, cfg, 4);
    REQUIRE(a.crowds.size() == b.crowds.size());
    for (std::size_t i = 0; i < a.crowds.size(); ++i) {
        CHECK(a.crowds[i].mean_ms == b.crowds[i].mean_ms);
        CHECK(a.dualpath[i].mean_ms == b.dualpath[i].mean_ms);
        CHECK(a.dualpath[i].failed == b.dualpath[i].failed);
    }
    const auto other = run_paired(sched, cfg, 5);
    CHECK(other.crowds[0].mean_ms != a.crowds[0].mean_ms);

    const auto only = run_timeseries(Protocol::dualpath, sched, cfg, 4);
    for (std::size_t i = 0; i < only.size(); ++i)
        CHECK(only[i].mean_ms == a.dualpath[i].mean_ms);
}

TEST_CASE("ledger terms sum to each recorded delay")
{
    SimConfig cfg;
    cfg.reps = 40;
    cfg.ticks = 2;
    cfg.threads = 1;
    auto sched = static_schedule(cfg);
    for (auto& t : sched)
        t.drop_ratio = 0.4;
    std::ostringstream os;
    const auto s = run_paired(sched, cfg, 1, &os);

    std::istringstream in(os.str());
    std::map<std::tuple<int, int, std::string>, double> totals;
    int tick, rep;
    std::string proto, kind;
    double ms;
    while (in >> tick >> rep >> proto >> kind >> ms)
        totals[{tick, rep, proto}] += ms;
    CHECK(totals.size() == 2u * 40u * 2u);
    for (int t = 1; t <= 2; ++t) {
        double c = 0.0, d = 0.0;
        for (int r = 0; r < 40; ++r) {
            c += totals[{t, r, "crowds"}];
            d += totals[{t, r, "dualpath"}];
        }
        CHECK(c / 40 == doctest::Approx(s.crowds[t - 1].mean_ms).epsilon(1e-6));
        CHECK(d / 40 == doctest::Approx(s.dualpath[t - 1].mean_ms).epsilon(1e-6));
    }
}

TEST_CASE("codec verification does not change the numbers")
{
    SimConfig cfg;
    cfg.reps = 30;
    cfg.ticks = 2;
    cfg.threads = 1;
    auto sched = static_schedule(cfg);
    for (auto& t : sched)
        t.drop_ratio = 0.3;
    const auto plain = run_timeseries(Protocol::dualpath, sched, cfg);
    cfg.verify_codec = true;
    const auto checked = run_timeseries(Protocol::dualpath, sched, cfg);
    for (std::size_t i = 0; i < plain.size(); ++i)
        CHECK(plain[i].mean_ms == checked[i].mean_ms);
}

TEST_CASE("config validation")
{
    SimConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.reps = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.drop_ratio = 1.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.traffic_rate = -1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.dualpath.change_probability = -0.1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = cfg;
    bad.crowds.forward_probability = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    // too few nodes for two disjoint three-peer paths
    SimConfig small = cfg;
    small.num_nodes = 7;
    CHECK_THROWS_AS(run_paired(static_schedule(small), small), ValidationError);
}
