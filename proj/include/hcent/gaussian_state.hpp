#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hcent/chain_model.hpp"

namespace hcent {

/// min(|i - j|, N - |i - j|)
std::size_t ring_lag(std::size_t i, std::size_t j, std::size_t n_sites) noexcept;

/// Two equal blocks A and B of `block_len` sites, B starting `separation`
/// sites after the end of A, going around a ring of `n_sites`.
class BlockPair {
 public:
  /// Throws DomainError if block_len == 0, offset_a >= n_sites or 2L + D > N.
  static BlockPair make(std::size_t n_sites, std::size_t block_len, std::size_t separation,
                        std::size_t offset_a = 0);

  std::size_t n_sites() const noexcept { return n_sites_; }
  std::size_t offset_a() const noexcept { return offset_a_; }
  std::size_t offset_b() const noexcept { return (offset_a_ + block_len_ + separation_) % n_sites_; }
  std::size_t block_len() const noexcept { return block_len_; }
  std::size_t separation() const noexcept { return separation_; }

  /// D / L
  double r() const noexcept;
  /// D / xi
  double d(const ChainSpec& spec) const;
  /// L / xi
  double l(const ChainSpec& spec) const;

  std::vector<std::size_t> sites_a() const;
  std::vector<std::size_t> sites_b() const;
  /// A then B.
  std::vector<std::size_t> union_sites() const;

  bool operator==(const BlockPair&) const = default;

 private:
  BlockPair(std::size_t n, std::size_t l, std::size_t d, std::size_t off)
      : n_sites_(n), block_len_(l), separation_(d), offset_a_(off) {}

  std::size_t n_sites_;
  std::size_t block_len_;
  std::size_t separation_;
  std::size_t offset_a_;
};

/// Position and momentum correlation blocks of the vacuum restricted to a
/// site list. Cross correlators <qp> vanish in this vacuum and are not stored.
///
/// A time-reversal mask s_i = +-1 may be attached; h_block() then already
/// contains s_i s_j H_ij. The position block is shared between a state and its
/// partial transposes.
class ReducedGaussianState {
 public:
  /// Builds a state from explicit blocks. Throws DomainError on size mismatch
  /// or asymmetry beyond 1e-12 relative.
  ReducedGaussianState(std::vector<std::size_t> sites, Eigen::MatrixXd g_block,
                       Eigen::MatrixXd h_block);

  /// Sites labelled 0..M-1.
  static ReducedGaussianState from_blocks(Eigen::MatrixXd g_block, Eigen::MatrixXd h_block);

  std::size_t size() const noexcept { return sites_.size(); }
  const std::vector<std::size_t>& sites() const noexcept { return sites_; }
  const Eigen::MatrixXd& g_block() const noexcept { return *g_block_; }
  const Eigen::MatrixXd& h_block() const noexcept { return h_block_; }
  const std::optional<std::vector<int>>& transpose_mask() const noexcept { return mask_; }
  bool is_transposed() const noexcept { return mask_.has_value(); }

  friend ReducedGaussianState partial_transpose(const ReducedGaussianState& state,
                                                std::span<const std::size_t> b_sites);

 private:
  ReducedGaussianState() = default;

  std::vector<std::size_t> sites_;
  std::shared_ptr<const Eigen::MatrixXd> g_block_;
  Eigen::MatrixXd h_block_;
  std::optional<std::vector<int>> mask_;
};

/// Restriction of the kernel to `sites` (distinct, each < N), in the given order.
ReducedGaussianState extract_block(const CorrelationKernel& kernel,
                                   std::span<const std::size_t> sites);

/// State of A u B, ordered A then B. The pair must live on the kernel's ring.
ReducedGaussianState union_state(const CorrelationKernel& kernel, const BlockPair& pair);

/// Time reversal p -> -p on `b_sites` (a subset of state.sites()).
/// Masks compose multiplicatively; a composed mask of all +1 is dropped, so
/// applying the same transpose twice gives back the original state exactly.
ReducedGaussianState partial_transpose(const ReducedGaussianState& state,
                                       std::span<const std::size_t> b_sites);

}  // namespace hcent
