#pragma once

// SHA-1 with the git blob framing, used for content hashes of fixture files.

#include <cstdint>
#include <string>

namespace opal {

// hex digest of the raw bytes
std::string sha1_hex(const std::string& data);

// hex digest of "blob <size>\0<data>", matching git hash-object
std::string git_blob_sha1(const std::string& data);

}  // namespace opal
