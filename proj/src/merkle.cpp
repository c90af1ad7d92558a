#include "qarg/merkle.hpp"

namespace qarg {

namespace {

constexpr uint8_t kLeafDomain = 0x00;
constexpr uint8_t kNodeDomain = 0x01;

Bytes leaf_digest(const HashSpec& hash, const Bytes& leaf) {
  return hash.digest2(kLeafDomain, leaf, {});
}

Bytes node_digest(const HashSpec& hash, const Bytes& l, const Bytes& r) {
  return hash.digest2(kNodeDomain, l, r);
}

}  // namespace

MerkleCommitment::MerkleCommitment(std::vector<Bytes> leaves,
                                   const HashSpec& hash)
    : leaves_(std::move(leaves)) {
  require(!leaves_.empty(), "merkle: need at least one leaf");
  size_t padded = 1;
  depth_ = 0;
  while (padded < leaves_.size()) {
    padded <<= 1;
    ++depth_;
  }
  leaves_.resize(padded);  // pad marker: empty leaf
  std::vector<Bytes> level;
  level.reserve(padded);
  for (const auto& l : leaves_) level.push_back(leaf_digest(hash, l));
  levels_.push_back(level);
  while (levels_.back().size() > 1) {
    const auto& prev = levels_.back();
    std::vector<Bytes> next;
    next.reserve(prev.size() / 2);
    for (size_t i = 0; i < prev.size(); i += 2)
      next.push_back(node_digest(hash, prev[i], prev[i + 1]));
    levels_.push_back(std::move(next));
  }
  root_ = levels_.back()[0];
}

MerklePath MerkleCommitment::open(size_t index) const {
  require(index < leaves_.size(), "merkle: index out of range");
  MerklePath path;
  size_t i = index;
  for (int lvl = 0; lvl < depth_; ++lvl) {
    path.siblings.push_back(levels_[size_t(lvl)][i ^ 1]);
    i >>= 1;
  }
  return path;
}

MerkleCommitment merkle_commit(std::vector<Bytes> leaves,
                               const HashSpec& hash) {
  return MerkleCommitment(std::move(leaves), hash);
}

bool merkle_verify(const Bytes& root, size_t index, const Bytes& leaf,
                   const MerklePath& path, const HashSpec& hash) {
  if (index >> path.siblings.size()) return false;
  Bytes h = leaf_digest(hash, leaf);
  size_t i = index;
  for (const auto& sib : path.siblings) {
    h = (i & 1) ? node_digest(hash, sib, h) : node_digest(hash, h, sib);
    i >>= 1;
  }
  return h == root;
}

std::vector<Bytes> bytes_to_leaves(const Bytes& data, size_t leaf_size) {
  require(leaf_size >= 1, "bytes_to_leaves: leaf size");
  std::vector<Bytes> leaves;
  if (data.empty()) {
    leaves.push_back({});
    return leaves;
  }
  for (size_t i = 0; i < data.size(); i += leaf_size) {
    size_t end = std::min(i + leaf_size, data.size());
    leaves.emplace_back(data.begin() + long(i), data.begin() + long(end));
  }
  return leaves;
}

}  // namespace qarg
