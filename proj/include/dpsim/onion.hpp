#ifndef DPSIM_ONION_HPP
#define DPSIM_ONION_HPP

#include "dpsim/cipher.hpp"
#include "dpsim/types.hpp"

#include <span>
#include <string>
#include <variant>

namespace dpsim::onion {

/**
 * One layer of the response route. `next_peer` travels in the clear; `tail`
 * is sealed for next_peer and holds either the following layer or the
 * terminator that names the requester.
 */
struct ResponsePathPacket
{
    PeerId next_peer;
    Bytes tail;

    friend bool operator==(const ResponsePathPacket&, const ResponsePathPacket&) = default;
};

struct WrappedMessage
{
    PeerId addressed_to;
    Bytes body; ///< sealed for addressed_to
    int hop_limit = 0;
};

struct ResponseEnvelope
{
    PeerId addressed_to;
    Bytes sealed_payload;
    Bytes tail;
};

struct Relay
{
    PeerId next;
    WrappedMessage inner;
};

struct Delivery
{
    Payload payload;
    ResponsePathPacket response;
};

struct ResponseRelay
{
    ResponseEnvelope next;
};

struct ResponseFinal
{
    Payload payload;
};

using PeelResult = std::variant<Relay, Delivery>;
using ResponseStep = std::variant<ResponseRelay, ResponseFinal>;

/// Default hop limit: path length plus two relays of slack.
inline int default_hop_limit(std::size_t request_peers) { return static_cast<int>(request_peers) + 2; }

ResponsePathPacket build_response_path(PeerId requester, std::span<const PeerId> response_peers,
                                       const CipherSuite& cipher);

/// Builds the request onion. The provider's innermost layer carries the
/// payload followed by the response packet.
WrappedMessage wrap_request(const Payload& payload, std::span<const PeerId> request_peers, PeerId provider,
                            const ResponsePathPacket& response_packet, const CipherSuite& cipher, int hop_limit);

/// Removes one layer at `at`. Throws CipherError for the wrong peer and
/// HopLimitError when the message has no hops left.
PeelResult peel(PeerId at, const WrappedMessage& msg, const CipherSuite& cipher);

ResponseEnvelope start_response(PeerId provider, const Payload& response_payload,
                                const ResponsePathPacket& response, const CipherSuite& cipher);

ResponseStep step_response(PeerId at, const ResponseEnvelope& env, const CipherSuite& cipher);

/// Number of sealed tail layers, counted by opening each one as its holder.
std::size_t response_depth(const ResponsePathPacket& packet, const CipherSuite& cipher);

/// Indented layer dump, for test diagnostics.
std::string dump_layers(const WrappedMessage& msg, const CipherSuite& cipher);

} // namespace dpsim::onion

#endif
