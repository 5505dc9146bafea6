#ifndef DPSIM_COST_HPP
#define DPSIM_COST_HPP

#include "dpsim/types.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace dpsim {

/// Unit costs, all linear in carried kilobytes.
struct CostModel
{
    double hop_ms_per_kb = 1.92;
    double encrypt_ms_per_kb = 0.8;
    double decrypt_ms_per_kb = 9.3;

    void validate() const;
};

struct NodeState
{
    PeerId id;
    bool up = true;
    /// Traffic-induced delay this node adds to every message it sends.
    double extra_delay_ms = 0.0;
};

enum class CryptoOp { seal, open };

/// Transmission time of one message sent by `sender`.
double hop_delay(double payload_kb, const NodeState& sender, const CostModel& costs);

/// One seal or open of a layer carrying `payload_kb`. Header bytes are free.
double crypto_cost(CryptoOp op, double payload_kb, const CostModel& costs);

enum class TermKind { hop, seal, open, fetch, rewrap, wait, abort };

std::string_view to_string(TermKind kind);

struct CostTerm
{
    TermKind kind;
    double ms;
};

/// Every cost charged to one transaction, in order.
class CostLedger
{
public:
    void add(TermKind kind, double ms) { terms_.push_back({kind, ms}); }
    void clear() { terms_.clear(); }
    double total() const;
    std::span<const CostTerm> terms() const { return terms_; }

private:
    std::vector<CostTerm> terms_;
};

/// Snapshot of the simulated network for one transaction. Node i has id i.
struct Network
{
    CostModel costs;
    std::vector<NodeState> nodes;

    const NodeState& node(PeerId id) const { return nodes.at(id.value); }
    bool is_up(PeerId id) const { return node(id).up; }

    /// `count` nodes, all up and idle.
    static Network idle(std::size_t count, const CostModel& costs = {});
};

} // namespace dpsim

#endif
