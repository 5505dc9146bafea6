#include "dpsim/cipher.hpp"

#include "dpsim/random.hpp"

namespace dpsim {

namespace {

constexpr std::uint8_t kMagic0 = 0xd5;
constexpr std::uint8_t kMagic1 = 0x1c;
constexpr std::size_t kHeader = 6;

void apply_keystream(PeerId recipient, std::span<std::uint8_t> data)
{
    std::uint64_t block = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (i % 8 == 0)
            block = mix64((std::uint64_t{recipient.value} << 32) ^ (i / 8));
        data[i] ^= static_cast<std::uint8_t>(block >> (8 * (i % 8)));
    }
}

} // namespace

std::string to_string(PeerId id) { return "P" + std::to_string(id.value); }

Payload Payload::of_size_kb(double kb, std::uint8_t fill)
{
    if (kb < 0)
        throw ValidationError("payload size must be nonnegative");
    Payload p;
    p.bytes.resize(static_cast<std::size_t>(kb * 1024.0 + 0.5));
    for (std::size_t i = 0; i < p.bytes.size(); ++i)
        p.bytes[i] = static_cast<std::uint8_t>(fill + i * 31);
    return p;
}

Bytes TaggedCipher::seal(PeerId recipient, std::span<const std::uint8_t> plaintext) const
{
    Bytes out;
    out.reserve(kHeader + plaintext.size());
    out.push_back(kMagic0);
    out.push_back(kMagic1);
    for (int s = 0; s < 32; s += 8)
        out.push_back(static_cast<std::uint8_t>(recipient.value >> s));
    out.insert(out.end(), plaintext.begin(), plaintext.end());
    apply_keystream(recipient, std::span(out).subspan(kHeader));
    return out;
}

Bytes TaggedCipher::open(PeerId recipient, std::span<const std::uint8_t> ciphertext) const
{
    if (ciphertext.size() < kHeader || ciphertext[0] != kMagic0 || ciphertext[1] != kMagic1)
        throw CipherError("not a sealed blob");
    std::uint32_t tagged = 0;
    for (int i = 0; i < 4; ++i)
        tagged |= std::uint32_t{ciphertext[2 + i]} << (8 * i);
    if (tagged != recipient.value)
        throw CipherError("sealed for " + to_string(PeerId{tagged}) + ", not " + to_string(recipient));
    Bytes out(ciphertext.begin() + kHeader, ciphertext.end());
    apply_keystream(recipient, out);
    return out;
}

} // namespace dpsim
