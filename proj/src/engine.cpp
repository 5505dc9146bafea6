#include "dpsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

namespace dpsim::sim {

namespace {

// stream labels
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kCrowdsStream = 2;
constexpr std::uint64_t kDualPathStream = 3;

bool is_exempt(PeerId id, std::span<const PeerId> exempt)
{
    return std::find(exempt.begin(), exempt.end(), id) != exempt.end();
}

struct Welford
{
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double std_error() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0; }
};

void write_terms(std::ostream& os, int tick, int rep, Protocol p, const CostLedger& ledger)
{
    char buf[96];
    for (const auto& t : ledger.terms()) {
        std::snprintf(buf, sizeof buf, "%d %d %s %s %.9f\n", tick, rep, to_string(p).data(),
                      to_string(t.kind).data(), t.ms);
        os << buf;
    }
}

struct TickResult
{
    TickSummary crowds;
    TickSummary dualpath;
    std::string ledger;
};

TickResult run_tick(const TickParams& tp, const SimConfig& cfg, std::uint64_t salt, bool want_crowds,
                    bool want_dualpath, bool want_ledger)
{
    TickResult res;
    const auto tick_label = static_cast<std::uint64_t>(tp.tick);
    const PeerId endpoints[] = {kRequester, kProvider};
    const double kb = tp.payload_kb;
    const double cap = cfg.timeout_factor *
                       dualpath::nominal_cycle_ms(cfg.dualpath.path_length, cfg.dualpath.path_length, kb, cfg.costs);

    Network net = Network::idle(static_cast<std::size_t>(tp.num_nodes), cfg.costs);
    dualpath::TrafficMap traffic(net.nodes.size());
    std::vector<PeerId> up;
    up.reserve(net.nodes.size());

    dualpath::Session session(kRequester, kProvider, cfg.dualpath);
    TaggedCipher cipher;
    Rng dp_rng(Rng::stream(cfg.seed, {salt, tick_label, kDualPathStream}));

    Welford crowds_stats, dual_stats;
    std::ostringstream ledger_text;
    CostLedger ledger;

    for (int rep = 0; rep < cfg.reps; ++rep) {
        const auto rep_label = static_cast<std::uint64_t>(rep);
        Rng env(Rng::stream(cfg.seed, {salt, tick_label, rep_label, kEnvStream}));
        sample_failures(env, net.nodes, tp.drop_ratio, endpoints);
        sample_traffic(env, net.nodes, tp.traffic_mean, cfg.traffic_spread, kb, endpoints);

        up.clear();
        auto& observed = traffic.raw();
        for (const auto& n : net.nodes) {
            observed[n.id.value] = n.extra_delay_ms;
            if (n.up && n.id != kRequester && n.id != kProvider)
                up.push_back(n.id);
        }

        if (want_crowds) {
            Rng rng(Rng::stream(cfg.seed, {salt, tick_label, rep_label, kCrowdsStream}));
            ledger.clear();
            double delay;
            bool aborted = false;
            try {
                const auto route = crowds::route_request(rng, kRequester, kProvider, up, cfg.crowds);
                delay = crowds_transaction(route, kRequester, kProvider, kb, net, cfg.crowds.charge_crypto,
                                           want_ledger ? &ledger : nullptr);
            } catch (const RoutingError&) {
                aborted = true;
                delay = cap;
                ledger.add(TermKind::abort, cap);
            }
            crowds_stats.add(delay);
            res.crowds.aborted += aborted;
            res.crowds.failed += aborted;
            if (want_ledger)
                write_terms(ledger_text, tp.tick, rep, Protocol::crowds, ledger);
        }

        if (want_dualpath) {
            ledger.clear();
            const auto rec = session.run(dp_rng, up, traffic, kb, net, cap, want_ledger ? &ledger : nullptr,
                                         cfg.verify_codec ? &cipher : nullptr);
            dual_stats.add(rec.delay_ms);
            res.dualpath.failed += rec.failures > 0 || rec.aborted;
            res.dualpath.aborted += rec.aborted;
            if (want_ledger)
                write_terms(ledger_text, tp.tick, rep, Protocol::dualpath, ledger);
        }
    }

    res.crowds.tick = res.dualpath.tick = tp.tick;
    res.crowds.mean_ms = crowds_stats.mean;
    res.crowds.std_error_ms = crowds_stats.std_error();
    res.dualpath.mean_ms = dual_stats.mean;
    res.dualpath.std_error_ms = dual_stats.std_error();
    if (want_ledger)
        res.ledger = ledger_text.str();
    return res;
}

void validate_schedule(std::span<const TickParams> schedule, const SimConfig& cfg)
{
    if (schedule.empty())
        throw ValidationError("empty schedule");
    const auto needed = static_cast<int>(cfg.dualpath.peers_needed()) + 2;
    for (const auto& tp : schedule) {
        if (tp.num_nodes < needed)
            throw ValidationError("tick " + std::to_string(tp.tick) + ": " + std::to_string(tp.num_nodes) +
                                  " nodes cannot host the dual-path (need " + std::to_string(needed) + ")");
        if (!(tp.payload_kb >= 0.0) || !(tp.traffic_mean >= 0.0))
            throw ValidationError("tick " + std::to_string(tp.tick) + ": negative payload or traffic");
        if (!(tp.drop_ratio >= 0.0 && tp.drop_ratio <= 1.0))
            throw ValidationError("tick " + std::to_string(tp.tick) + ": drop ratio outside [0, 1]");
    }
}

PairedSeries run_core(std::span<const TickParams> schedule, const SimConfig& cfg, std::uint64_t salt,
                      std::ostream* ledger_out, bool want_crowds, bool want_dualpath)
{
    cfg.validate();
    validate_schedule(schedule, cfg);

    std::vector<TickResult> results(schedule.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < schedule.size();)
            results[i] = run_tick(schedule[i], cfg, salt, want_crowds, want_dualpath, ledger_out != nullptr);
    };

    unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
    threads = std::clamp(threads, 1u, static_cast<unsigned>(schedule.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    PairedSeries out;
    for (auto& r : results) {
        if (want_crowds)
            out.crowds.push_back(r.crowds);
        if (want_dualpath)
            out.dualpath.push_back(r.dualpath);
        if (ledger_out)
            *ledger_out << r.ledger;
    }
    return out;
}

} // namespace

void SimConfig::validate() const
{
    costs.validate();
    crowds.validate();
    dualpath.validate();
    if (reps < 1)
        throw ValidationError("reps must be >= 1");
    if (ticks < 1)
        throw ValidationError("ticks must be >= 1");
    if (!(payload_kb >= 0.0))
        throw ValidationError("payload_kb must be >= 0");
    if (!(drop_ratio >= 0.0 && drop_ratio <= 1.0))
        throw ValidationError("drop_ratio must be in [0, 1]");
    if (!(base_traffic >= 0.0) || !(traffic_rate >= 0.0) || !(traffic_spread >= 0.0))
        throw ValidationError("traffic settings must be nonnegative");
    if (!(timeout_factor > 0.0))
        throw ValidationError("timeout_factor must be > 0");
    if (threads < 0)
        throw ValidationError("threads must be >= 0");
    if (num_nodes < static_cast<int>(dualpath.peers_needed()) + 2)
        throw ValidationError("num_nodes must be at least " + std::to_string(dualpath.peers_needed() + 2) +
                              " for path_length " + std::to_string(dualpath.path_length));
}

std::string_view to_string(Protocol p) { return p == Protocol::crowds ? "crowds" : "dualpath"; }

void sample_failures(Rng& rng, std::span<NodeState> nodes, double drop_ratio, std::span<const PeerId> exempt)
{
    for (auto& n : nodes) {
        if (is_exempt(n.id, exempt)) {
            n.up = true;
            continue;
        }
        n.up = !(drop_ratio > 0.0 && rng.bernoulli(drop_ratio));
    }
}

void sample_traffic(Rng& rng, std::span<NodeState> nodes, double mean, double spread, double payload_kb,
                    std::span<const PeerId> exempt)
{
    const double hi = spread * mean;
    for (auto& n : nodes) {
        if (is_exempt(n.id, exempt) || hi <= 0.0) {
            n.extra_delay_ms = 0.0;
            continue;
        }
        n.extra_delay_ms = rng.uniform(0.0, hi) * payload_kb;
    }
}

double crowds_transaction(const crowds::CrowdsRoute& route, PeerId requester, PeerId provider, double payload_kb,
                          const Network& net, bool charge_crypto, CostLedger* ledger)
{
    double total = 0.0;
    const double seal = crypto_cost(CryptoOp::seal, payload_kb, net.costs);
    const double open = crypto_cost(CryptoOp::open, payload_kb, net.costs);
    auto transmit = [&](PeerId from) {
        const double hop = hop_delay(payload_kb, net.node(from), net.costs);
        total += hop;
        if (ledger)
            ledger->add(TermKind::hop, hop);
        if (charge_crypto) {
            total += seal + open;
            if (ledger) {
                ledger->add(TermKind::seal, seal);
                ledger->add(TermKind::open, open);
            }
        }
    };

    transmit(requester);
    for (auto hop : route.hops)
        transmit(hop);
    // the provider answers the last jondo; each jondo passes the reply back
    transmit(provider);
    for (auto hop : crowds::route_response(route))
        transmit(hop);
    return total;
}

PairedSeries run_paired(std::span<const TickParams> schedule, const SimConfig& cfg, std::uint64_t stream_salt,
                        std::ostream* ledger_out)
{
    return run_core(schedule, cfg, stream_salt, ledger_out, true, true);
}

std::vector<TickSummary> run_timeseries(Protocol protocol, std::span<const TickParams> schedule,
                                        const SimConfig& cfg, std::uint64_t stream_salt)
{
    auto s = run_core(schedule, cfg, stream_salt, nullptr, protocol == Protocol::crowds,
                      protocol == Protocol::dualpath);
    return protocol == Protocol::crowds ? std::move(s.crowds) : std::move(s.dualpath);
}

std::vector<TickParams> static_schedule(const SimConfig& cfg)
{
    std::vector<TickParams> s;
    for (int t = 1; t <= cfg.ticks; ++t)
        s.push_back({t, cfg.payload_kb, cfg.base_traffic, cfg.num_nodes,
                     cfg.performance_failures ? cfg.drop_ratio : 0.0});
    return s;
}

} // namespace dpsim::sim
