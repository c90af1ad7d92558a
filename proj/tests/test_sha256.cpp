#include <doctest.h>

#include "qarg/sha256.hpp"

using namespace qarg;

namespace {
Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }
}  // namespace

TEST_CASE("sha256 FIPS vectors") {
  // empty string and "abc", from the standard test vectors
  auto empty = sha256(Bytes{});
  CHECK(to_hex(Bytes(empty.begin(), empty.end())) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  auto d = sha256(bytes_of("abc"));
  CHECK(to_hex(Bytes(d.begin(), d.end())) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  auto e = sha256(bytes_of(
      "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"));
  CHECK(to_hex(Bytes(e.begin(), e.end())) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("multi-block input") {
  Bytes big(1000, 0x5a);
  auto d1 = sha256(big);
  auto d2 = sha256(big);
  CHECK(d1 == d2);
  big[999] ^= 1;
  CHECK(sha256(big) != d1);
}

TEST_CASE("keyed digests separate by key and domain") {
  HashSpec h1{bytes_of("key-one")};
  HashSpec h2{bytes_of("key-two")};
  Bytes data = bytes_of("payload");
  CHECK(h1.digest(data) != h2.digest(data));
  CHECK(h1.digest(data).size() == 32);
  CHECK(h1.digest2(0, data, {}) != h1.digest2(1, data, {}));
}

TEST_CASE("truncated digests for weak-hash harnesses") {
  HashSpec weak{bytes_of("k"), 1};
  CHECK(weak.digest(bytes_of("x")).size() == 1);
}
