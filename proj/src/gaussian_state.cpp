#include "hcent/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "hcent/errors.hpp"

namespace hcent {

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* name) {
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw DomainError(std::string(name) + " is not symmetric (max |A - A^T| = " + std::to_string(asym) + ")");
  }
}

}  // namespace

std::size_t ring_lag(std::size_t i, std::size_t j, std::size_t n_sites) noexcept {
  const std::size_t diff = i > j ? i - j : j - i;
  return std::min(diff, n_sites - diff);
}

BlockPair BlockPair::make(std::size_t n_sites, std::size_t block_len, std::size_t separation,
                          std::size_t offset_a) {
  if (block_len == 0) throw DomainError("block length must be positive");
  if (offset_a >= n_sites) {
    throw DomainError("offset " + std::to_string(offset_a) + " outside ring of " + std::to_string(n_sites));
  }
  if (2 * block_len + separation > n_sites) {
    throw DomainError("blocks do not fit on the ring: 2L + D = " + std::to_string(2 * block_len + separation) +
                      " > N = " + std::to_string(n_sites));
  }
  return BlockPair(n_sites, block_len, separation, offset_a);
}

double BlockPair::r() const noexcept {
  return static_cast<double>(separation_) / static_cast<double>(block_len_);
}

double BlockPair::d(const ChainSpec& spec) const { return static_cast<double>(separation_) / spec.xi(); }

double BlockPair::l(const ChainSpec& spec) const { return static_cast<double>(block_len_) / spec.xi(); }

std::vector<std::size_t> BlockPair::sites_a() const {
  std::vector<std::size_t> s(block_len_);
  for (std::size_t i = 0; i < block_len_; ++i) s[i] = (offset_a_ + i) % n_sites_;
  return s;
}

std::vector<std::size_t> BlockPair::sites_b() const {
  std::vector<std::size_t> s(block_len_);
  const std::size_t start = offset_b();
  for (std::size_t i = 0; i < block_len_; ++i) s[i] = (start + i) % n_sites_;
  return s;
}

std::vector<std::size_t> BlockPair::union_sites() const {
  auto s = sites_a();
  auto b = sites_b();
  s.insert(s.end(), b.begin(), b.end());
  return s;
}

ReducedGaussianState::ReducedGaussianState(std::vector<std::size_t> sites, Eigen::MatrixXd g_block,
                                           Eigen::MatrixXd h_block)
    : sites_(std::move(sites)) {
  const auto m = static_cast<Eigen::Index>(sites_.size());
  if (g_block.rows() != m || g_block.cols() != m || h_block.rows() != m || h_block.cols() != m) {
    throw DomainError("correlation blocks must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  check_symmetric(g_block, "position block");
  check_symmetric(h_block, "momentum block");
  g_block_ = std::make_shared<const Eigen::MatrixXd>(std::move(g_block));
  h_block_ = std::move(h_block);
}

ReducedGaussianState ReducedGaussianState::from_blocks(Eigen::MatrixXd g_block, Eigen::MatrixXd h_block) {
  std::vector<std::size_t> sites(static_cast<std::size_t>(g_block.rows()));
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i] = i;
  return ReducedGaussianState(std::move(sites), std::move(g_block), std::move(h_block));
}

ReducedGaussianState extract_block(const CorrelationKernel& kernel, std::span<const std::size_t> sites) {
  const std::size_t n = kernel.n_sites();
  std::unordered_set<std::size_t> seen;
  seen.reserve(sites.size());
  for (std::size_t s : sites) {
    if (s >= n) throw DomainError("site " + std::to_string(s) + " outside ring of " + std::to_string(n));
    if (!seen.insert(s).second) throw DomainError("duplicate site " + std::to_string(s));
  }

  const auto m = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd g(m, m);
  Eigen::MatrixXd h(m, m);
  const auto gk = kernel.g();
  const auto hk = kernel.h();
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t lag = ring_lag(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)], n);
      g(i, j) = gk[lag];
      h(i, j) = hk[lag];
    }
  }
  return ReducedGaussianState(std::vector<std::size_t>(sites.begin(), sites.end()), std::move(g), std::move(h));
}

ReducedGaussianState union_state(const CorrelationKernel& kernel, const BlockPair& pair) {
  if (pair.n_sites() != kernel.n_sites()) {
    throw DomainError("block pair defined on a ring of " + std::to_string(pair.n_sites()) +
                      " sites, kernel has " + std::to_string(kernel.n_sites()));
  }
  const auto sites = pair.union_sites();
  return extract_block(kernel, sites);
}

ReducedGaussianState partial_transpose(const ReducedGaussianState& state, std::span<const std::size_t> b_sites) {
  std::unordered_map<std::size_t, std::size_t> position;
  position.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) position.emplace(state.sites_[i], i);

  std::vector<int> flip(state.size(), 1);
  for (std::size_t s : b_sites) {
    auto it = position.find(s);
    if (it == position.end()) throw DomainError("site " + std::to_string(s) + " is not part of the state");
    flip[it->second] = -1;
  }

  ReducedGaussianState out;
  out.sites_ = state.sites_;
  out.g_block_ = state.g_block_;
  out.h_block_ = state.h_block_;
  const auto m = static_cast<Eigen::Index>(state.size());
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (flip[static_cast<std::size_t>(i)] != flip[static_cast<std::size_t>(j)]) out.h_block_(i, j) = -out.h_block_(i, j);
    }
  }

  std::vector<int> mask = state.mask_.value_or(std::vector<int>(state.size(), 1));
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] *= flip[i];
  if (std::ranges::any_of(mask, [](int s) { return s != 1; })) out.mask_ = std::move(mask);
  return out;
}

}  // namespace hcent
