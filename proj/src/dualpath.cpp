#include "dpsim/dualpath.hpp"

#include "dpsim/onion.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace dpsim::dualpath {

std::string_view to_string(SelectionMode mode)
{
    return mode == SelectionMode::traffic_aware ? "traffic_aware" : "uniform_random";
}

std::string_view to_string(FailureWait wait) { return wait == FailureWait::round_trip ? "round_trip" : "partial"; }

void DualPathConfig::validate() const
{
    if (path_length < 0)
        throw ValidationError("path_length must be >= 0");
    if (!(change_probability >= 0.0 && change_probability <= 1.0))
        throw ValidationError("change_probability must be in [0, 1]");
    if (max_recoveries < 0)
        throw ValidationError("max_recoveries must be >= 0");
}

std::size_t DualPathConfig::peers_needed() const
{
    return static_cast<std::size_t>(path_length) * (disjoint_paths ? 2 : 1);
}

void TrafficMap::set(PeerId peer, double delay_ms)
{
    if (!(delay_ms >= 0.0))
        throw ValidationError("traffic delay must be nonnegative");
    if (peer.value >= delay_.size())
        delay_.resize(peer.value + 1, 0.0);
    delay_[peer.value] = delay_ms;
}

void DualPath::validate(PeerId requester, PeerId provider, bool disjoint) const
{
    auto check = [&](const std::vector<PeerId>& path, int limit, const char* name) {
        std::set<PeerId> seen;
        for (auto p : path) {
            if (p == requester || p == provider)
                throw ValidationError(std::string(name) + " contains an endpoint");
            if (!seen.insert(p).second)
                throw ValidationError(std::string(name) + " repeats " + to_string(p));
        }
        if (limit < static_cast<int>(path.size()) + 1)
            throw ValidationError(std::string(name) + " hop limit too small");
    };
    check(request_path, request_hop_limit, "request path");
    check(response_path, response_hop_limit, "response path");
    if (disjoint) {
        for (auto p : request_path)
            if (std::find(response_path.begin(), response_path.end(), p) != response_path.end())
                throw ValidationError("paths share " + to_string(p));
    }
}

namespace {

// Moves a uniform sample of k elements to the front of `pool`.
void partial_shuffle(Rng& rng, std::vector<PeerId>& pool, std::size_t k)
{
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
}

} // namespace

DualPath select_paths(Rng& rng, std::span<const PeerId> members, PeerId requester, PeerId provider,
                      const DualPathConfig& cfg, const TrafficMap& traffic)
{
    cfg.validate();
    std::vector<PeerId> pool;
    pool.reserve(members.size());
    for (auto p : members)
        if (p != requester && p != provider)
            pool.push_back(p);

    const auto len = static_cast<std::size_t>(cfg.path_length);
    const std::size_t needed = cfg.peers_needed();
    if (pool.size() < needed)
        throw SelectionError("need " + std::to_string(needed) + " peers for the dual-path, only " +
                             std::to_string(pool.size()) + " available");

    if (cfg.selection == SelectionMode::traffic_aware && needed > 0) {
        auto lighter = [&](PeerId a, PeerId b) {
            const double ta = traffic.at(a), tb = traffic.at(b);
            return ta != tb ? ta < tb : a < b;
        };
        std::nth_element(pool.begin(), pool.begin() + (needed - 1), pool.end(), lighter);
        pool.resize(needed);
        std::sort(pool.begin(), pool.end(), lighter);
    }

    DualPath dp;
    if (cfg.disjoint_paths) {
        partial_shuffle(rng, pool, 2 * len);
        dp.request_path.assign(pool.begin(), pool.begin() + len);
        dp.response_path.assign(pool.begin() + len, pool.begin() + 2 * len);
    } else {
        partial_shuffle(rng, pool, len);
        dp.request_path.assign(pool.begin(), pool.begin() + len);
        partial_shuffle(rng, pool, len);
        dp.response_path.assign(pool.begin(), pool.begin() + len);
    }
    // slack of 0 or 1 so the two paths rarely share a hop limit
    dp.request_hop_limit = static_cast<int>(len) + 1 + static_cast<int>(rng.below(2));
    dp.response_hop_limit = static_cast<int>(len) + 1 + static_cast<int>(rng.below(2));
    return dp;
}

bool should_rotate(Rng& rng, double change_probability)
{
    if (!(change_probability >= 0.0 && change_probability <= 1.0))
        throw ValidationError("change_probability must be in [0, 1]");
    return rng.bernoulli(change_probability);
}

namespace {

/// Receives each hop the walk completes; used to drive the codec in lockstep.
class HopObserver
{
public:
    virtual ~HopObserver() = default;
    virtual void request_hop(PeerId at) = 0;
    virtual void response_hop(PeerId at) = 0;
};

TransactionOutcome walk(PeerId requester, PeerId provider, const DualPath& path, double kb, const Network& net,
                        CostLedger* ledger, HopObserver* observer)
{
    const auto& costs = net.costs;
    TransactionOutcome out;
    auto charge = [&](TermKind kind, double ms) {
        out.nominal_ms += ms;
        if (!out.failed) {
            out.delay_ms += ms;
            if (ledger)
                ledger->add(kind, ms);
        }
    };
    auto send = [&](PeerId from, PeerId to) {
        charge(TermKind::hop, hop_delay(kb, net.node(from), costs));
        if (out.failed)
            return false;
        ++out.hops_used;
        if (!net.is_up(to)) {
            out.failed = true;
            out.failed_at = to;
            return false;
        }
        return true;
    };

    const double seal = crypto_cost(CryptoOp::seal, kb, costs);
    const double open = crypto_cost(CryptoOp::open, kb, costs);

    // request: one layer per relay plus the provider's
    for (std::size_t i = 0; i <= path.request_path.size(); ++i)
        charge(TermKind::seal, seal);
    PeerId from = requester;
    for (std::size_t i = 0; i <= path.request_path.size(); ++i) {
        const PeerId to = i < path.request_path.size() ? path.request_path[i] : provider;
        const bool ok = send(from, to);
        charge(TermKind::open, open);
        if (ok && observer)
            observer->request_hop(to);
        from = to;
    }

    // response: sealed hop by hop, re-sealed by every relay
    charge(TermKind::seal, seal);
    for (std::size_t i = 0; i <= path.response_path.size(); ++i) {
        const PeerId to = i < path.response_path.size() ? path.response_path[i] : requester;
        const bool ok = send(from, to);
        charge(TermKind::open, open);
        if (to != requester)
            charge(TermKind::seal, seal);
        if (ok && observer)
            observer->response_hop(to);
        from = to;
    }
    return out;
}

class CodecDriver final : public HopObserver
{
public:
    CodecDriver(PeerId requester, PeerId provider, const DualPath& path, const Payload& payload,
                const CipherSuite& cipher)
        : requester_(requester), provider_(provider), payload_(payload), cipher_(cipher)
    {
        const auto packet = onion::build_response_path(requester, path.response_path, cipher);
        msg_ = onion::wrap_request(payload, path.request_path, provider, packet, cipher, path.request_hop_limit);
    }

    void request_hop(PeerId at) override
    {
        if (msg_.addressed_to != at)
            throw std::logic_error("request reached " + to_string(at) + " but is addressed to " +
                                   to_string(msg_.addressed_to));
        auto res = onion::peel(at, msg_, cipher_);
        if (auto* relay = std::get_if<onion::Relay>(&res)) {
            msg_ = std::move(relay->inner);
            return;
        }
        if (at != provider_)
            throw std::logic_error("request delivered at " + to_string(at) + " instead of the provider");
        auto& d = std::get<onion::Delivery>(res);
        if (!(d.payload == payload_))
            throw std::logic_error("request payload corrupted");
        env_ = onion::start_response(provider_, payload_, d.response, cipher_);
    }

    void response_hop(PeerId at) override
    {
        if (!env_ || env_->addressed_to != at)
            throw std::logic_error("response reached " + to_string(at) + " out of order");
        auto step = onion::step_response(at, *env_, cipher_);
        if (auto* relay = std::get_if<onion::ResponseRelay>(&step)) {
            env_ = std::move(relay->next);
            return;
        }
        if (at != requester_)
            throw std::logic_error("response finished at " + to_string(at) + " instead of the requester");
        if (!(std::get<onion::ResponseFinal>(step).payload == payload_))
            throw std::logic_error("response payload corrupted");
        env_.reset();
        completed_ = true;
    }

    bool completed() const { return completed_; }

private:
    PeerId requester_;
    PeerId provider_;
    const Payload& payload_;
    const CipherSuite& cipher_;
    onion::WrappedMessage msg_;
    std::optional<onion::ResponseEnvelope> env_;
    bool completed_ = false;
};

} // namespace

TransactionOutcome transact(PeerId requester, PeerId provider, const DualPath& path, double payload_kb,
                            const Network& net, CostLedger* ledger)
{
    return walk(requester, provider, path, payload_kb, net, ledger, nullptr);
}

TransactionOutcome transact(PeerId requester, PeerId provider, const DualPath& path, const Payload& payload,
                            const CipherSuite& cipher, const Network& net, CostLedger* ledger)
{
    CodecDriver driver(requester, provider, path, payload, cipher);
    auto out = walk(requester, provider, path, payload.size_kb(), net, ledger, &driver);
    if (!out.failed && !driver.completed())
        throw std::logic_error("cycle finished without the requester receiving its response");
    return out;
}

double nominal_cycle_ms(int request_len, int response_len, double payload_kb, const CostModel& costs)
{
    const double per_leg = payload_kb * (costs.hop_ms_per_kb + costs.encrypt_ms_per_kb + costs.decrypt_ms_per_kb);
    return (request_len + response_len + 2) * per_leg;
}

Recovery recover(Rng& rng, std::span<const PeerId> members, PeerId requester, PeerId provider,
                 const DualPathConfig& cfg, const TrafficMap& traffic, double payload_kb, const CostModel& costs,
                 CostLedger* ledger)
{
    Recovery r;
    r.path = select_paths(rng, members, requester, provider, cfg, traffic);
    const double fetch = 2.0 * costs.hop_ms_per_kb;
    const double rewrap =
        static_cast<double>(r.path.request_path.size() + 1) * crypto_cost(CryptoOp::seal, payload_kb, costs);
    if (ledger) {
        ledger->add(TermKind::fetch, fetch);
        ledger->add(TermKind::rewrap, rewrap);
    }
    r.penalty_ms = fetch + rewrap;
    return r;
}

Session::Session(PeerId requester, PeerId provider, DualPathConfig cfg)
    : requester_(requester), provider_(provider), cfg_(cfg)
{
    cfg_.validate();
}

TransactionRecord Session::run(Rng& rng, std::span<const PeerId> members, const TrafficMap& traffic,
                               double payload_kb, const Network& net, double timeout_cap_ms, CostLedger* ledger,
                               const CipherSuite* cipher)
{
    TransactionRecord rec;
    std::optional<Payload> payload;
    if (cipher)
        payload = Payload::of_size_kb(payload_kb);
    CostLedger local;
    auto abort = [&] {
        rec.aborted = true;
        rec.delay_ms = timeout_cap_ms;
        if (ledger)
            ledger->add(TermKind::abort, timeout_cap_ms);
        return rec;
    };

    rec.rotated = should_rotate(rng, cfg_.change_probability);
    if (!current_ || rec.rotated) {
        try {
            current_ = select_paths(rng, members, requester_, provider_, cfg_, traffic);
        } catch (const SelectionError&) {
            return abort();
        }
    }

    for (;;) {
        CostLedger attempt;
        const auto out = cipher ? transact(requester_, provider_, *current_, *payload, *cipher, net, &attempt)
                                : transact(requester_, provider_, *current_, payload_kb, net, &attempt);
        if (!out.failed) {
            for (const auto& t : attempt.terms())
                local.add(t.kind, t.ms);
            break;
        }
        ++rec.failures;
        if (cfg_.failure_wait == FailureWait::round_trip)
            local.add(TermKind::wait, out.nominal_ms);
        else
            for (const auto& t : attempt.terms())
                local.add(t.kind, t.ms);
        if (rec.failures > cfg_.max_recoveries)
            return abort();
        try {
            current_ = recover(rng, members, requester_, provider_, cfg_, traffic, payload_kb, net.costs, &local).path;
        } catch (const SelectionError&) {
            current_.reset();
            return abort();
        }
    }

    rec.delay_ms = local.total();
    if (ledger)
        for (const auto& t : local.terms())
            ledger->add(t.kind, t.ms);
    return rec;
}

} // namespace dpsim::dualpath
