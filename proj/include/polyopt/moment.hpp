#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "polyopt/polynomial.hpp"

namespace polyopt {

// Coordinate system for the pseudo-moment vector y: every monomial of degree
// <= max_degree in graded-lex order. Coordinate 0 is the constant monomial
// (pinned to 1 by the relaxation), and the index built for a higher degree
// extends the lower-degree one by suffix only.
class MomentIndex {
 public:
  MomentIndex() = default;
  static MomentIndex up_to_degree(int n, int max_degree);

  int size() const { return static_cast<int>(monomials_.size()); }
  int dimension() const { return n_; }
  int max_degree() const { return max_degree_; }
  const Monomial& monomial(int i) const { return monomials_[static_cast<size_t>(i)]; }
  std::optional<int> find(const Monomial& m) const;
  int at(const Monomial& m) const;  // throws std::out_of_range when absent

 private:
  struct ExpoHash {
    size_t operator()(const std::vector<int>& v) const noexcept;
  };
  int n_ = 0;
  int max_degree_ = 0;
  std::vector<Monomial> monomials_;
  std::unordered_map<std::vector<int>, int, ExpoHash> lookup_;
};

struct SymEntry {
  int row = 0;
  int col = 0;  // row <= col
  double value = 0.0;
};

// One affine PSD block  B(y) = sum_{i >= 1} y_i * M_i - M0.  The constant
// monomial's contribution is folded into M0 with flipped sign, which pins
// y_0 = 1 inside the block value.
struct SdpBlock {
  int dim = 0;
  // coordinate -> upper-triangle entries of M_i, sorted by coordinate (>= 1)
  std::vector<std::pair<int, std::vector<SymEntry>>> coeffs;
  Eigen::MatrixXd m0;

  Eigen::MatrixXd value(const Eigen::Ref<const Eigen::VectorXd>& y) const;
};

enum class BlockKind { kMoment, kLocalizing };

struct BlockSpec {
  int id = 0;  // 0 for the moment block, k+1 for constraint k's block
  BlockKind kind = BlockKind::kMoment;
  int constraint = -1;  // localizing blocks only
  int order = 0;        // w for the moment block, w - v_k otherwise
  MonomialBasis row_basis;
  SdpBlock block;
};

// M_w(y): rows/cols indexed by the full degree-<=w basis.
BlockSpec build_moment_block(int n, int w, const MomentIndex& idx);

// M_{w - v}(f y) with v = ceil(deg(f)/2); throws std::invalid_argument when
// the block is not yet available (w - v < 0).
BlockSpec build_localizing_block(const Polynomial& f, int constraint, int w,
                                 const MomentIndex& idx);
int localizing_offset(const Polynomial& f);

// All blocks of the level-w relaxation plus the constraint maps. Blocks start
// in `pending`; activation order defines the solver's block order.
struct BlockRegistry {
  std::vector<BlockSpec> active;
  std::vector<BlockSpec> pending;
  std::vector<std::vector<int>> constraint_vars;  // constraint -> variables in its polynomial

  bool activate(int id);        // pending -> active, false when absent
  void activate_all_pending();
  const BlockSpec* find_active(int id) const;
};

// Enumerates the moment block and every available localizing block at level
// w. The block -> constraint map is deterministic (each localizing block
// records its constraint); when probe_seed is set it is cross-checked per
// constraint by the randomized perturbation probe, which must flag exactly
// the matching block (std::logic_error otherwise).
BlockRegistry enumerate_blocks(const PopInstance& inst, int w, const MomentIndex& idx,
                               std::optional<std::uint64_t> probe_seed = {});

// Randomized constraint-to-block probe: scale constraint j's coefficients by
// independent (1+u), u ~ U[0.1, 0.2], evaluate all blocks at a random y, and
// return the ids of blocks whose value changed.
std::vector<int> probe_flagged_blocks(const PopInstance& inst, int constraint, int w,
                                      const MomentIndex& idx, std::uint64_t seed);

// Aggregate over the active blocks, plus the objective cost vector c with
// F(y) = c'y (the constant coefficient of f0 sits at coordinate 0).
class AggregateOperator {
 public:
  struct Occurrence {
    int block = 0;
    int entry = 0;  // index into blocks()[block].coeffs
  };

  AggregateOperator(Eigen::VectorXd cost, std::vector<SdpBlock> blocks);

  int num_coords() const { return static_cast<int>(cost_.size()); }
  const Eigen::VectorXd& cost() const { return cost_; }
  const std::vector<SdpBlock>& blocks() const { return blocks_; }
  const std::vector<Occurrence>& occurrences(int coord) const {
    return occ_[static_cast<size_t>(coord)];
  }
  // sum over blocks of ||M_i||_F^2 for coordinate i; 0 means the coordinate
  // does not appear and stays frozen.
  double coeff_norm2(int coord) const { return norm2_[static_cast<size_t>(coord)]; }
  double objective(const Eigen::Ref<const Eigen::VectorXd>& y) const;
  double dual_objective(const std::vector<Eigen::MatrixXd>& Z) const;  // -sum <M0_b, Z_b>

 private:
  Eigen::VectorXd cost_;
  std::vector<SdpBlock> blocks_;
  std::vector<std::vector<Occurrence>> occ_;
  std::vector<double> norm2_;
};

AggregateOperator assemble(const PopInstance& inst, const BlockRegistry& registry,
                           const MomentIndex& idx);

}  // namespace polyopt
