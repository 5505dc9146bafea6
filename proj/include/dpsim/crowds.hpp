#ifndef DPSIM_CROWDS_HPP
#define DPSIM_CROWDS_HPP

#include "dpsim/random.hpp"
#include "dpsim/types.hpp"

#include <set>
#include <span>
#include <vector>

namespace dpsim::crowds {

/// Centralised membership server. Members are kept in join order.
class Blender
{
public:
    /// Adds `peer` and returns the full current member list, which is what
    /// both the newcomer and every earlier member get to see.
    const std::vector<PeerId>& register_member(PeerId peer);

    const std::vector<PeerId>& members() const { return members_; }
    bool contains(PeerId peer) const { return index_.contains(peer); }

private:
    std::vector<PeerId> members_;
    std::set<PeerId> index_;
};

struct CrowdsConfig
{
    /// Probability that a jondo forwards to another jondo instead of
    /// submitting to the provider.
    double forward_probability = 0.5;
    int max_hops = 64;
    /// Charge RSA seal+open per Crowds transmission. Off by default: Crowds
    /// uses symmetric path keys whose cost the model ignores.
    bool charge_crypto = false;

    void validate() const;
};

/// Jondos visited by a request, in order. Requester and provider excluded.
struct CrowdsRoute
{
    std::vector<PeerId> hops;
};

/// Random walk over `members` (the currently reachable crowd). Requester and
/// provider are never picked as jondos; a jondo may pick itself.
CrowdsRoute route_request(Rng& rng, PeerId requester, PeerId provider, std::span<const PeerId> members,
                          const CrowdsConfig& cfg);

/// Replies travel back over the request's jondos in reverse.
std::vector<PeerId> route_response(const CrowdsRoute& route);

} // namespace dpsim::crowds

#endif
