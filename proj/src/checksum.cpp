#include "checksum.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

#include "error.hpp"

namespace gm {

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr))
        fail(Errc::internal, "SHA-256 digest failed");

    std::string hex(2 * len, '\0');
    static const char* alphabet = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i) {
        hex[2 * i] = alphabet[digest[i] >> 4];
        hex[2 * i + 1] = alphabet[digest[i] & 0xf];
    }
    return hex;
}

} // namespace gm
