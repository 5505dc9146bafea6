#ifndef DPSIM_CIPHER_HPP
#define DPSIM_CIPHER_HPP

#include "dpsim/types.hpp"

#include <span>

namespace dpsim {

/// Public-key style sealing: only `recipient` can open what was sealed for it.
class CipherSuite
{
public:
    virtual ~CipherSuite() = default;

    virtual Bytes seal(PeerId recipient, std::span<const std::uint8_t> plaintext) const = 0;

    /// Throws CipherError if `ciphertext` was not sealed for `recipient`.
    virtual Bytes open(PeerId recipient, std::span<const std::uint8_t> ciphertext) const = 0;
};

/**
 * Test cipher: a recipient tag followed by the plaintext XORed with a
 * keystream derived from the recipient id. Not secure; it only enforces
 * recipient binding and keeps ciphertext unreadable to a casual observer.
 */
class TaggedCipher final : public CipherSuite
{
public:
    Bytes seal(PeerId recipient, std::span<const std::uint8_t> plaintext) const override;
    Bytes open(PeerId recipient, std::span<const std::uint8_t> ciphertext) const override;
};

} // namespace dpsim

#endif
