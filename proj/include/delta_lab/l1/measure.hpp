#pragma once

// Finite measure-space models of L1(mu): a partition into cells, each either
// an atom or a (divisible) nonatomic piece, with step functions and their
// L-infinity step duals living on that partition.

#include "delta_lab/error.hpp"
#include "delta_lab/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace delta_lab::l1 {

enum class CellKind { Atom, Nonatomic };

constexpr std::string_view to_string(CellKind kind) { return kind == CellKind::Atom ? "ATOM" : "NONATOMIC"; }

template <Scalar T>
struct Cell {
  int id = 0;
  T mass{};
  CellKind kind = CellKind::Nonatomic;

  friend bool operator==(const Cell&, const Cell&) = default;
};

template <Scalar T>
class MeasureModel {
 public:
  MeasureModel() = default;

  explicit MeasureModel(std::vector<Cell<T>> cells) : cells_(std::move(cells)) {
    std::set<int> ids;
    for (const auto& c : cells_) {
      require(c.mass > 0, ErrorCode::InvalidArgument, "cell masses must be positive");
      require(ids.insert(c.id).second, ErrorCode::InvalidArgument, "duplicate cell id " + std::to_string(c.id));
    }
  }

  /// `n` cells of equal mass `total / n`.
  static MeasureModel uniform(std::size_t n, CellKind kind, T total = T(1)) {
    std::vector<Cell<T>> cells;
    for (std::size_t i = 0; i < n; ++i) cells.push_back({static_cast<int>(i), total / T(static_cast<long>(n)), kind});
    return MeasureModel(std::move(cells));
  }

  const std::vector<Cell<T>>& cells() const { return cells_; }
  const Cell<T>& cell(std::size_t index) const { return cells_.at(index); }
  std::size_t size() const { return cells_.size(); }

  std::size_t index_of(int id) const {
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].id == id) return i;
    fail(ErrorCode::InvalidArgument, "no cell with id " + std::to_string(id));
  }

  T total_mass() const {
    T s(0);
    for (const auto& c : cells_) s += c.mass;
    return s;
  }

  int next_id() const {
    int m = -1;
    for (const auto& c : cells_) m = std::max(m, c.id);
    return m + 1;
  }

  bool has_atoms() const {
    return std::any_of(cells_.begin(), cells_.end(), [](const auto& c) { return c.kind == CellKind::Atom; });
  }

  friend bool operator==(const MeasureModel&, const MeasureModel&) = default;

 private:
  std::vector<Cell<T>> cells_;
};

/// Result of refining one cell: the new model and where the pieces sit.
/// Pieces occupy indices [index, index + pieces) in the refined model.
template <Scalar T>
struct Refinement {
  MeasureModel<T> model;
  std::size_t index = 0;
  std::size_t pieces = 1;

  /// Lifts any per-cell vector of the coarse model (values, dual coefficients).
  template <class V>
  std::vector<V> lift(const std::vector<V>& coarse) const {
    std::vector<V> out;
    out.reserve(coarse.size() + pieces - 1);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      const std::size_t copies = (i == index) ? pieces : 1;
      for (std::size_t k = 0; k < copies; ++k) out.push_back(coarse[i]);
    }
    return out;
  }
};

/// Replaces a NONATOMIC cell by two NONATOMIC cells of masses
/// fraction * m (keeping the id) and (1 - fraction) * m (fresh id).
template <Scalar T>
Refinement<T> split_cell(const MeasureModel<T>& model, int cell_id, const T& fraction) {
  const std::size_t i = model.index_of(cell_id);
  const Cell<T>& c = model.cell(i);
  require(c.kind == CellKind::Nonatomic, ErrorCode::AtomIndivisible,
          "cell " + std::to_string(cell_id) + " is an atom and cannot be split");
  require(fraction > 0 && fraction < 1, ErrorCode::InvalidArgument, "split fraction must lie in (0,1)");
  std::vector<Cell<T>> cells = model.cells();
  Cell<T> left{c.id, c.mass * fraction, CellKind::Nonatomic};
  Cell<T> right{model.next_id(), c.mass - left.mass, CellKind::Nonatomic};
  cells[i] = left;
  cells.insert(cells.begin() + static_cast<std::ptrdiff_t>(i) + 1, right);
  return {MeasureModel<T>(std::move(cells)), i, 2};
}

/// Splits a NONATOMIC cell into `pieces` cells of equal mass.
template <Scalar T>
Refinement<T> subdivide_cell(const MeasureModel<T>& model, int cell_id, std::size_t pieces) {
  const std::size_t i = model.index_of(cell_id);
  const Cell<T>& c = model.cell(i);
  require(c.kind == CellKind::Nonatomic, ErrorCode::AtomIndivisible,
          "cell " + std::to_string(cell_id) + " is an atom and cannot be split");
  require(pieces >= 1, ErrorCode::InvalidArgument, "need at least one piece");
  std::vector<Cell<T>> cells;
  int fresh = model.next_id();
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (j != i) {
      cells.push_back(model.cell(j));
      continue;
    }
    const T piece = c.mass / T(static_cast<long>(pieces));
    for (std::size_t k = 0; k < pieces; ++k) cells.push_back({k == 0 ? c.id : fresh++, piece, CellKind::Nonatomic});
  }
  return {MeasureModel<T>(std::move(cells)), i, pieces};
}

template <Scalar T>
class StepFunction {
 public:
  StepFunction() = default;

  StepFunction(MeasureModel<T> model, std::vector<T> values) : model_(std::move(model)), values_(std::move(values)) {
    require(values_.size() == model_.size(), ErrorCode::InvalidArgument, "one value per cell required");
  }

  static StepFunction zero(const MeasureModel<T>& model) { return StepFunction(model, std::vector<T>(model.size(), T(0))); }

  /// sign / mu(cell) on a single cell: the extreme points of the unit ball.
  static StepFunction normalized_indicator(const MeasureModel<T>& model, std::size_t index, int sign = 1) {
    std::vector<T> v(model.size(), T(0));
    v.at(index) = T(sign) / model.cell(index).mass;
    return StepFunction(model, std::move(v));
  }

  const MeasureModel<T>& model() const { return model_; }
  const std::vector<T>& values() const { return values_; }
  const T& value(std::size_t index) const { return values_.at(index); }

  T norm() const {
    T s(0);
    for (std::size_t i = 0; i < values_.size(); ++i) s += abs_of(values_[i]) * model_.cell(i).mass;
    return s;
  }

  /// Integral of |f| over one cell.
  T mass_on(std::size_t index) const { return abs_of(values_.at(index)) * model_.cell(index).mass; }

  bool in_support(std::size_t index) const { return values_.at(index) != 0; }

  StepFunction lifted(const Refinement<T>& r) const { return StepFunction(r.model, r.lift(values_)); }

  StepFunction scaled(const T& s) const {
    auto v = values_;
    for (auto& x : v) x *= s;
    return StepFunction(model_, std::move(v));
  }

  friend StepFunction operator-(const StepFunction& a, const StepFunction& b) { return combine(a, b, T(-1)); }
  friend StepFunction operator+(const StepFunction& a, const StepFunction& b) { return combine(a, b, T(1)); }
  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  static StepFunction combine(const StepFunction& a, const StepFunction& b, const T& sb) {
    require(a.model_ == b.model_, ErrorCode::MixedSpaces, "step functions live on different partitions");
    auto v = a.values_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += sb * b.values_[i];
    return StepFunction(a.model_, std::move(v));
  }

  MeasureModel<T> model_;
  std::vector<T> values_;
};

/// Element of L-infinity acting by integration: x*(f) = sum a_i f_i mu_i.
template <Scalar T>
struct DualStep {
  MeasureModel<T> model;
  std::vector<T> coefficients;

  T operator()(const StepFunction<T>& f) const {
    require(f.model() == model, ErrorCode::MixedSpaces, "functional and point live on different partitions");
    T s(0);
    for (std::size_t i = 0; i < coefficients.size(); ++i) s += coefficients[i] * f.value(i) * model.cell(i).mass;
    return s;
  }

  T dual_norm() const {
    T m(0);
    for (const auto& a : coefficients) m = max_of(m, abs_of(a));
    return m;
  }

  DualStep lifted(const Refinement<T>& r) const { return {r.model, r.lift(coefficients)}; }

  friend bool operator==(const DualStep&, const DualStep&) = default;
};

/// Lifts a step function and a dual through splitting every NONATOMIC cell
/// into `pieces` equal parts.
template <Scalar T>
MeasureModel<T> refine_all_nonatomic(const MeasureModel<T>& model, std::size_t pieces,
                                     std::vector<std::size_t>* parent = nullptr) {
  std::vector<Cell<T>> cells;
  if (parent) parent->clear();
  int fresh = model.next_id();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& c = model.cell(i);
    const std::size_t k = c.kind == CellKind::Nonatomic ? pieces : 1;
    for (std::size_t j = 0; j < k; ++j) {
      cells.push_back({j == 0 ? c.id : fresh++, c.mass / T(static_cast<long>(k)), c.kind});
      if (parent) parent->push_back(i);
    }
  }
  return MeasureModel<T>(std::move(cells));
}

template <Scalar T>
StepFunction<T> lift_to(const StepFunction<T>& f, const MeasureModel<T>& refined, const std::vector<std::size_t>& parent) {
  std::vector<T> v;
  v.reserve(parent.size());
  for (auto p : parent) v.push_back(f.value(p));
  return StepFunction<T>(refined, std::move(v));
}

template <Scalar T>
DualStep<T> lift_to(const DualStep<T>& d, const MeasureModel<T>& refined, const std::vector<std::size_t>& parent) {
  std::vector<T> a;
  a.reserve(parent.size());
  for (auto p : parent) a.push_back(d.coefficients.at(p));
  return {refined, std::move(a)};
}

}  // namespace delta_lab::l1
