#ifndef TDPI_DIGEST_HPP
#define TDPI_DIGEST_HPP

#include <cstdint>
#include <string>

namespace tdpi {

// SHA-256 of a byte string, hex-encoded.
std::string sha256_hex(const std::string& bytes);

} // namespace tdpi

#endif
