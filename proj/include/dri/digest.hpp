#ifndef DRI_DIGEST_HPP
#define DRI_DIGEST_HPP

#include <array>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "dri/error.hpp"

namespace dri {

/// Lower-case hex SHA-256 of `data`.
inline std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

}  // namespace dri

#endif  // DRI_DIGEST_HPP
