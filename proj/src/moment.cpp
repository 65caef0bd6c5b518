#include "polyopt/moment.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>

namespace polyopt {

size_t MomentIndex::ExpoHash::operator()(const std::vector<int>& v) const noexcept {
  size_t h = 1469598103934665603ull;
  for (int x : v) {
    h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

MomentIndex MomentIndex::up_to_degree(int n, int max_degree) {
  if (n < 1) throw std::invalid_argument("MomentIndex: n must be at least 1");
  if (max_degree < 0) throw std::invalid_argument("MomentIndex: negative degree");
  MomentIndex idx;
  idx.n_ = n;
  idx.max_degree_ = max_degree;
  idx.monomials_ = full_basis(n, max_degree).monomials;
  idx.lookup_.reserve(idx.monomials_.size());
  for (size_t i = 0; i < idx.monomials_.size(); ++i) {
    idx.lookup_.emplace(idx.monomials_[i].exponents(), static_cast<int>(i));
  }
  return idx;
}

std::optional<int> MomentIndex::find(const Monomial& m) const {
  auto it = lookup_.find(m.exponents());
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

int MomentIndex::at(const Monomial& m) const {
  auto pos = find(m);
  if (!pos) throw std::out_of_range("MomentIndex: monomial outside the index");
  return *pos;
}

Eigen::MatrixXd SdpBlock::value(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  Eigen::MatrixXd B = -m0;
  for (const auto& [coord, entries] : coeffs) {
    const double yc = y[coord];
    for (const auto& e : entries) {
      B(e.row, e.col) += e.value * yc;
      if (e.row != e.col) B(e.col, e.row) += e.value * yc;
    }
  }
  return B;
}

namespace {

// Accumulates sum_terms c * y_{u_i + u_j + delta} over the row basis into
// per-coordinate coefficient matrices; the constant coordinate is folded into
// m0 with flipped sign.
SdpBlock accumulate_block(const MonomialBasis& rows, const Polynomial& weight,
                          const MomentIndex& idx) {
  const int g = rows.size();
  std::map<int, std::map<std::pair<int, int>, double>> acc;
  Eigen::MatrixXd m0 = Eigen::MatrixXd::Zero(g, g);

  for (int i = 0; i < g; ++i) {
    for (int j = i; j < g; ++j) {
      const Monomial base = rows.monomials[static_cast<size_t>(i)] +
                            rows.monomials[static_cast<size_t>(j)];
      for (const auto& [mon, coef] : weight.terms()) {
        const int coord = idx.at(base + mon);
        if (coord == 0) {
          m0(i, j) -= coef;
          if (i != j) m0(j, i) -= coef;
        } else {
          acc[coord][{i, j}] += coef;
        }
      }
    }
  }

  SdpBlock block;
  block.dim = g;
  block.m0 = std::move(m0);
  for (const auto& [coord, entries] : acc) {
    std::vector<SymEntry> list;
    list.reserve(entries.size());
    for (const auto& [pos, v] : entries) {
      if (v != 0.0) list.push_back({pos.first, pos.second, v});
    }
    if (!list.empty()) block.coeffs.emplace_back(coord, std::move(list));
  }
  return block;
}

}  // namespace

BlockSpec build_moment_block(int n, int w, const MomentIndex& idx) {
  if (w < 1) throw std::invalid_argument("moment block needs order >= 1");
  if (2 * w > idx.max_degree())
    throw std::invalid_argument("moment block exceeds the index degree");
  BlockSpec spec;
  spec.id = 0;
  spec.kind = BlockKind::kMoment;
  spec.order = w;
  spec.row_basis = full_basis(n, w);
  spec.block = accumulate_block(spec.row_basis, Polynomial::constant(n, 1.0), idx);
  return spec;
}

int localizing_offset(const Polynomial& f) { return (f.degree() + 1) / 2; }

BlockSpec build_localizing_block(const Polynomial& f, int constraint, int w,
                                 const MomentIndex& idx) {
  const int order = w - localizing_offset(f);
  if (order < 0)
    throw std::invalid_argument("localizing block not available at this level");
  BlockSpec spec;
  spec.id = constraint + 1;
  spec.kind = BlockKind::kLocalizing;
  spec.constraint = constraint;
  spec.order = order;
  spec.row_basis = full_basis(f.dimension(), order);
  spec.block = accumulate_block(spec.row_basis, f, idx);
  return spec;
}

bool BlockRegistry::activate(int id) {
  for (auto it = pending.begin(); it != pending.end(); ++it) {
    if (it->id == id) {
      active.push_back(std::move(*it));
      pending.erase(it);
      return true;
    }
  }
  return false;
}

void BlockRegistry::activate_all_pending() {
  for (auto& spec : pending) active.push_back(std::move(spec));
  pending.clear();
}

const BlockSpec* BlockRegistry::find_active(int id) const {
  for (const auto& spec : active) {
    if (spec.id == id) return &spec;
  }
  return nullptr;
}

std::vector<int> probe_flagged_blocks(const PopInstance& inst, int constraint, int w,
                                      const MomentIndex& idx, std::uint64_t seed) {
  const Polynomial& f = inst.constraints[static_cast<size_t>(constraint)].poly;
  if (f.is_zero()) return {};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pert(0.1, 0.2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Polynomial perturbed(inst.n);
  for (const auto& [mon, coef] : f.terms()) {
    perturbed.add_term(mon, coef * (1.0 + pert(rng)));
  }

  Eigen::VectorXd y(idx.size());
  y[0] = 1.0;
  for (int i = 1; i < idx.size(); ++i) y[i] = unif(rng);

  std::vector<int> flagged;
  auto compare = [&](const BlockSpec& a, const BlockSpec& b) {
    const Eigen::MatrixXd va = a.block.value(y);
    const Eigen::MatrixXd vb = b.block.value(y);
    const double scale = 1.0 + va.cwiseAbs().maxCoeff();
    if ((va - vb).cwiseAbs().maxCoeff() > 1e-12 * scale) flagged.push_back(a.id);
  };

  compare(build_moment_block(inst.n, w, idx), build_moment_block(inst.n, w, idx));
  for (int k = 0; k < inst.num_constraints(); ++k) {
    const Polynomial& fk = inst.constraints[static_cast<size_t>(k)].poly;
    if (w - localizing_offset(fk) < 0) continue;
    if (k == constraint) {
      compare(build_localizing_block(fk, k, w, idx),
              build_localizing_block(perturbed, k, w, idx));
    } else {
      compare(build_localizing_block(fk, k, w, idx),
              build_localizing_block(fk, k, w, idx));
    }
  }
  return flagged;
}

BlockRegistry enumerate_blocks(const PopInstance& inst, int w, const MomentIndex& idx,
                               std::optional<std::uint64_t> probe_seed) {
  BlockRegistry reg;
  reg.pending.push_back(build_moment_block(inst.n, w, idx));
  for (int k = 0; k < inst.num_constraints(); ++k) {
    const Polynomial& f = inst.constraints[static_cast<size_t>(k)].poly;
    if (w - localizing_offset(f) < 0) continue;
    reg.pending.push_back(build_localizing_block(f, k, w, idx));
  }

  reg.constraint_vars.resize(static_cast<size_t>(inst.num_constraints()));
  for (int k = 0; k < inst.num_constraints(); ++k) {
    std::vector<bool> used(static_cast<size_t>(inst.n), false);
    for (const auto& [mon, coef] : inst.constraints[static_cast<size_t>(k)].poly.terms()) {
      for (int i = 0; i < inst.n; ++i) {
        if (mon.exponent(i) > 0) used[static_cast<size_t>(i)] = true;
      }
    }
    for (int i = 0; i < inst.n; ++i) {
      if (used[static_cast<size_t>(i)]) reg.constraint_vars[static_cast<size_t>(k)].push_back(i);
    }
  }

  if (probe_seed) {
    for (int k = 0; k < inst.num_constraints(); ++k) {
      const Polynomial& f = inst.constraints[static_cast<size_t>(k)].poly;
      if (f.is_zero() || w - localizing_offset(f) < 0) continue;
      const auto flagged =
          probe_flagged_blocks(inst, k, w, idx, *probe_seed + static_cast<std::uint64_t>(k));
      if (flagged.size() != 1 || flagged.front() != k + 1)
        throw std::logic_error("constraint-to-block probe disagrees with the direct map");
    }
  }
  return reg;
}

AggregateOperator::AggregateOperator(Eigen::VectorXd cost, std::vector<SdpBlock> blocks)
    : cost_(std::move(cost)), blocks_(std::move(blocks)) {
  if (cost_.size() < 1) throw std::invalid_argument("aggregate needs at least one coordinate");
  if (blocks_.empty()) throw std::invalid_argument("aggregate needs at least one block");
  occ_.resize(static_cast<size_t>(cost_.size()));
  norm2_.assign(static_cast<size_t>(cost_.size()), 0.0);
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto& coeffs = blocks_[b].coeffs;
    for (size_t e = 0; e < coeffs.size(); ++e) {
      const int coord = coeffs[e].first;
      if (coord < 1 || coord >= cost_.size())
        throw std::invalid_argument("block coordinate outside the cost vector");
      occ_[static_cast<size_t>(coord)].push_back({static_cast<int>(b), static_cast<int>(e)});
      double n2 = 0.0;
      for (const auto& entry : coeffs[e].second) {
        n2 += (entry.row == entry.col ? 1.0 : 2.0) * entry.value * entry.value;
      }
      norm2_[static_cast<size_t>(coord)] += n2;
    }
  }
}

double AggregateOperator::objective(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  return cost_.dot(y);
}

double AggregateOperator::dual_objective(const std::vector<Eigen::MatrixXd>& Z) const {
  double total = 0.0;
  for (size_t b = 0; b < blocks_.size(); ++b) {
    total -= (blocks_[b].m0.array() * Z[b].array()).sum();
  }
  return total;
}

AggregateOperator assemble(const PopInstance& inst, const BlockRegistry& registry,
                           const MomentIndex& idx) {
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(idx.size());
  for (const auto& [mon, coef] : inst.objective.terms()) {
    const auto pos = idx.find(mon);
    if (!pos)
      throw std::invalid_argument("objective monomial exceeds the relaxation degree");
    cost[*pos] += coef;
  }
  std::vector<SdpBlock> blocks;
  blocks.reserve(registry.active.size());
  for (const auto& spec : registry.active) blocks.push_back(spec.block);
  return AggregateOperator(std::move(cost), std::move(blocks));
}

}  // namespace polyopt
