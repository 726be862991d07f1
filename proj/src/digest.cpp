#include "loadpat/digest.hpp"

#include <openssl/sha.h>

#include <array>
#include <cstdio>

namespace loadpat {

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> md{};
    SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), md.data());
    std::string out;
    out.reserve(md.size() * 2);
    char buf[3];
    for (auto byte : md) {
        std::snprintf(buf, sizeof buf, "%02x", byte);
        out += buf;
    }
    return out;
}

}  // namespace loadpat
