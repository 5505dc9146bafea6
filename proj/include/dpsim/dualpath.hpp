#ifndef DPSIM_DUALPATH_HPP
#define DPSIM_DUALPATH_HPP

#include "dpsim/cipher.hpp"
#include "dpsim/cost.hpp"
#include "dpsim/random.hpp"
#include "dpsim/types.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dpsim::dualpath {

enum class SelectionMode { uniform_random, traffic_aware };

/// What a failed attempt costs the requester before it starts recovery.
enum class FailureWait {
    /// The requester only notices the missing response, i.e. after one
    /// nominal round trip of the attempted dual-path.
    round_trip,
    /// Only the costs accrued up to the broken hop.
    partial,
};

std::string_view to_string(SelectionMode mode);
std::string_view to_string(FailureWait wait);

struct DualPathConfig
{
    int path_length = 3;
    /// Probability of drawing a fresh dual-path before a transaction.
    double change_probability = 0.5;
    SelectionMode selection = SelectionMode::traffic_aware;
    bool disjoint_paths = true;
    FailureWait failure_wait = FailureWait::round_trip;
    /// Recoveries allowed within one transaction before it is aborted.
    int max_recoveries = 4;

    void validate() const;
    /// Peers needed besides requester and provider.
    std::size_t peers_needed() const;
};

/// Extra per-message delay observed at each peer. Unknown peers read as 0.
class TrafficMap
{
public:
    TrafficMap() = default;
    explicit TrafficMap(std::size_t peers) : delay_(peers, 0.0) {}

    void set(PeerId peer, double delay_ms);
    double at(PeerId peer) const { return peer.value < delay_.size() ? delay_[peer.value] : 0.0; }
    void assign(std::size_t peers, double delay_ms) { delay_.assign(peers, delay_ms); }
    std::vector<double>& raw() { return delay_; }

private:
    std::vector<double> delay_;
};

struct DualPath
{
    std::vector<PeerId> request_path;
    std::vector<PeerId> response_path;
    int request_hop_limit = 1;
    int response_hop_limit = 1;

    /// Throws ValidationError unless the dual-path is well formed.
    void validate(PeerId requester, PeerId provider, bool disjoint) const;
};

/// Draws a dual-path from `members` (the requester's view of reachable
/// peers). Endpoints in `members` are skipped.
DualPath select_paths(Rng& rng, std::span<const PeerId> members, PeerId requester, PeerId provider,
                      const DualPathConfig& cfg, const TrafficMap& traffic);

bool should_rotate(Rng& rng, double change_probability);

struct TransactionOutcome
{
    /// Cost actually accrued; stops at the broken hop when failed.
    double delay_ms = 0.0;
    /// Cost of the full cycle had every node been up.
    double nominal_ms = 0.0;
    int hops_used = 0;
    bool failed = false;
    std::optional<PeerId> failed_at;
};

/// One request/response cycle over `path`, costed against `net`. A down peer
/// on either path fails the cycle at the hop that tries to reach it.
TransactionOutcome transact(PeerId requester, PeerId provider, const DualPath& path, double payload_kb,
                            const Network& net, CostLedger* ledger = nullptr);

/// Same cycle, additionally pushing real onion layers through the codec and
/// checking that every relay forwards to the configured next peer. Throws
/// std::logic_error if the codec disagrees with the configured route.
TransactionOutcome transact(PeerId requester, PeerId provider, const DualPath& path, const Payload& payload,
                            const CipherSuite& cipher, const Network& net, CostLedger* ledger = nullptr);

/// Zero-traffic cost of one cycle with `path_length` peers on each path.
double nominal_cycle_ms(int request_len, int response_len, double payload_kb, const CostModel& costs);

struct Recovery
{
    DualPath path;
    double penalty_ms = 0.0;
};

/// Fresh dual-path after a failure. The penalty is one membership fetch
/// round trip at the 1 KB rate plus re-sealing the request onion.
Recovery recover(Rng& rng, std::span<const PeerId> members, PeerId requester, PeerId provider,
                 const DualPathConfig& cfg, const TrafficMap& traffic, double payload_kb, const CostModel& costs,
                 CostLedger* ledger = nullptr);

struct TransactionRecord
{
    double delay_ms = 0.0;
    int failures = 0;
    bool rotated = false;
    bool aborted = false;
};

/// Requester-side state: keeps its dual-path between transactions.
class Session
{
public:
    Session(PeerId requester, PeerId provider, DualPathConfig cfg);

    /// Runs one transaction: rotation decision, attempt, and recovery until
    /// success. Gives up with `timeout_cap_ms` when no path can be formed.
    /// With a cipher, every attempt also runs the onion codec.
    TransactionRecord run(Rng& rng, std::span<const PeerId> members, const TrafficMap& traffic,
                          double payload_kb, const Network& net, double timeout_cap_ms,
                          CostLedger* ledger = nullptr, const CipherSuite* cipher = nullptr);

    const std::optional<DualPath>& current() const { return current_; }

private:
    PeerId requester_;
    PeerId provider_;
    DualPathConfig cfg_;
    std::optional<DualPath> current_;
};

} // namespace dpsim::dualpath

#endif
