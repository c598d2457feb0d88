#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lmx/error.hpp"
#include "lmx/ext_real.hpp"

namespace lmx {

enum class SpaceKind { Dense, Cellular };

/// How a cell may be cut into two sub-cells without breaking homogeneity.
enum class SplitRule {
  None,
  /// All points of the cell are interchangeable: every other cell sees either
  /// none or all of it, and the cell sees either only the center or all of
  /// itself.
  Interchangeable,
  /// Lower cell of a layered block space (second-type spaces); the split
  /// refines the blocks of every cell along the shared block order.
  Positional,
};

enum class GeneratorKind { None, FirstType, FirstTypePrime, SecondType, SecondTypePrime, Combined };

std::string_view to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(std::string_view name);

struct Cell {
  std::string id;
  BigInt count;       // number of points, >= 1
  ExtReal weight;     // measure of each point, > 0
  std::vector<std::string> tags;
  SplitRule split = SplitRule::None;

  bool has_tag(std::string_view tag) const;
  /// Integer value of a "key=value" tag, if present.
  std::optional<long long> tag_value(std::string_view key) const;
};

struct BallMember {
  std::size_t cell;   // index into FiniteSpace::cells()
  BigInt count;       // points of that cell inside the ball, per center point
  ExtReal count_x;    // same value as ExtReal
};

/// Closed ball around any point of a cell. Members are sorted by cell index
/// and omit zero counts.
struct Ball {
  double radius = 0.0;
  std::vector<BallMember> members;
  ExtReal mass;       // measure of the ball

  BigInt count_of(std::size_t cell) const;
};

struct BallProfile {
  std::vector<Ball> balls;  // strictly increasing radii, balls[0] is {x}
};

/// Block structure of the second-type spaces: lower level i has lower_counts[i]
/// points of mass lower_weights[i]; upper level i has upper_counts[i] points of
/// mass upper_weights[i]. Every level shares the block order on [0,1).
struct PositionalModel {
  std::vector<BigInt> lower_counts;
  std::vector<BigInt> upper_counts;
  std::vector<ExtReal> lower_weights;
  std::vector<ExtReal> upper_weights;
  /// Adjacent lower/upper points sit at this distance, all others at twice it.
  double radius_scale = 1.0;
  /// Set once a lower cell has been split: (level index, gamma).
  std::optional<std::pair<std::size_t, BigInt>> split;
};

class FiniteSpace;

/// Provenance recorded by the combiner.
struct CombinedInfo {
  std::vector<FiniteSpace> components;      // as given, before rescaling
  std::vector<double> metric_scale;         // rho'_n = metric_scale[n] * rho_n
  std::vector<ExtReal> measure_scale;       // mu'_n = measure_scale[n] * mu_n (after normalization)
  std::vector<std::size_t> first_cell;      // index of the component's first cell
};

/// Finite metric measure space in dense (explicit distance matrix) or cellular
/// (homogeneous cells with ball profiles) form. Immutable after construction.
class FiniteSpace {
 public:
  FiniteSpace() = default;

  /// Dense space: one cell of count 1 per point; `distances` is row-major n*n.
  static FiniteSpace dense(std::vector<std::string> ids, std::vector<ExtReal> weights,
                           std::vector<double> distances);

  /// Cellular space from raw profiles. Zero members are dropped, member lists
  /// sorted, and consecutive balls with identical content merged (the smaller
  /// radius is kept). Throws Inconsistent for malformed input (bad indices,
  /// wrong number of profiles); axiom checks live in validate_space.
  static FiniteSpace cellular(std::vector<Cell> cells,
                              std::vector<std::vector<std::pair<double, std::vector<std::pair<std::size_t, BigInt>>>>> raw_profiles);

  SpaceKind kind() const { return kind_; }
  bool is_dense() const { return kind_ == SpaceKind::Dense; }

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t cell_count() const { return cells_.size(); }
  const Cell& cell(std::size_t i) const { return cells_.at(i); }
  std::size_t cell_index(std::string_view id) const;
  std::optional<std::size_t> find_cell(std::string_view id) const;

  /// Cellular only.
  const std::vector<BallProfile>& profiles() const { return profiles_; }
  const BallProfile& profile(std::size_t cell) const { return profiles_.at(cell); }

  /// Dense only: distance between points i and j.
  double distance(std::size_t i, std::size_t j) const { return matrix_[i * cells_.size() + j]; }
  const std::vector<double>& matrix() const { return matrix_; }

  BigInt point_count() const;
  const ExtReal& total_measure() const { return total_; }
  /// Largest distance occurring in the space (0 for a single point).
  double diameter() const;

  GeneratorKind generator() const { return generator_; }
  const std::shared_ptr<const PositionalModel>& positional() const { return positional_; }
  const std::shared_ptr<const CombinedInfo>& combined() const { return combined_; }

  FiniteSpace with_generator(GeneratorKind kind) const;
  FiniteSpace with_positional(std::shared_ptr<const PositionalModel> model) const;
  FiniteSpace with_combined(std::shared_ptr<const CombinedInfo> info) const;

 private:
  void index_ids();

  SpaceKind kind_ = SpaceKind::Cellular;
  std::vector<Cell> cells_;
  std::vector<BallProfile> profiles_;
  std::vector<double> matrix_;
  ExtReal total_;
  std::vector<std::pair<std::string, std::size_t>> id_index_;  // sorted by id
  GeneratorKind generator_ = GeneratorKind::None;
  std::shared_ptr<const PositionalModel> positional_;
  std::shared_ptr<const CombinedInfo> combined_;
};

struct Violation {
  std::string invariant;  // e.g. "symmetry", "coverage", "triangle"
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(std::string_view invariant) const;
};

ValidationReport validate_space(const FiniteSpace& space);

/// Explicit dense space with one point per cell member. Distances come from
/// the ball profiles: points of two cells are matched block-by-block, with
/// nested blocks for nested radii.
FiniteSpace realize_dense(const FiniteSpace& space, std::size_t point_cap);

/// Index of the first dense point of each cell in realize_dense's output.
std::vector<std::size_t> dense_offsets(const FiniteSpace& space);

/// Dense space viewed as a cellular space with one cell per point.
FiniteSpace to_cellular(const FiniteSpace& space);

FiniteSpace split_cell(const FiniteSpace& space, std::string_view cell_id, const BigInt& gamma);

/// rho -> metric_factor * rho, mu -> measure_factor * mu.
FiniteSpace scale_space(const FiniteSpace& space, double metric_factor, const ExtReal& measure_factor);

/// Cellular space of a layered block structure; `model.split` optionally cuts
/// lower level `split->first` after its first `split->second` points.
FiniteSpace build_positional(const PositionalModel& model);

}  // namespace lmx
