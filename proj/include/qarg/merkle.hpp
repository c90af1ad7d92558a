#pragma once

#include "qarg/sha256.hpp"
#include "qarg/types.hpp"

namespace qarg {

// Binary Merkle tree over byte-string leaves, padded to a power of two with
// empty pad leaves. Leaf and node digests are domain separated.
struct MerklePath {
  std::vector<Bytes> siblings;  // sibling digest per level, leaf upward
};

class MerkleCommitment {
 public:
  MerkleCommitment() = default;
  MerkleCommitment(std::vector<Bytes> leaves, const HashSpec& hash);

  const Bytes& root() const { return root_; }
  int depth() const { return depth_; }
  size_t leaf_count() const { return leaves_.size(); }  // padded count
  const Bytes& leaf(size_t index) const { return leaves_.at(index); }

  MerklePath open(size_t index) const;

 private:
  std::vector<Bytes> leaves_;
  std::vector<std::vector<Bytes>> levels_;  // digests, leaf level first
  Bytes root_;
  int depth_ = 0;
};

MerkleCommitment merkle_commit(std::vector<Bytes> leaves,
                               const HashSpec& hash);
bool merkle_verify(const Bytes& root, size_t index, const Bytes& leaf,
                   const MerklePath& path, const HashSpec& hash);

// 32-byte chunking used for committed protocol messages.
std::vector<Bytes> bytes_to_leaves(const Bytes& data, size_t leaf_size = 32);

}  // namespace qarg
