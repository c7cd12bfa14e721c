#pragma once

#include <string>
#include <vector>

#include "brcdf/rng.hpp"
#include "brcdf/types.hpp"

namespace brcdf {

/// Diagonal 0/1 selection pattern with a fixed number of ones, evolved by
/// right-circular shifts of the diagonal. Patterns are stored as sorted index
/// sets; matrices are materialized only at the linear-algebra boundary.
class SelectionSchedule {
 public:
  SelectionSchedule(int state_dim, int shift, std::vector<int> ones);

  /// Uniformly random subset of the given size.
  static SelectionSchedule random(int state_dim, int shared_count, int shift, RngStream& rng);
  /// Pattern from a 0/1 string such as "11000000".
  static SelectionSchedule from_pattern(const std::string& pattern, int shift);

  int state_dim() const { return m_; }
  int shared_count() const { return static_cast<int>(ones_.size()); }
  int shift() const { return tau_; }
  /// p_e = l / m.
  double sharing_fraction() const { return static_cast<double>(shared_count()) / m_; }
  /// True when gcd(shift, m) == 1, i.e. the circular shift visits every
  /// coordinate equally often over a full cycle.
  bool uniform_coverage() const;

  const std::vector<int>& ones() const { return ones_; }
  bool selects(int coordinate) const;

  SelectionSchedule advanced() const;
  void advance();

  Vector diagonal() const;
  Matrix matrix() const;
  /// S x without materializing S.
  Vector mask(const Vector& x) const;
  std::string pattern_string() const;

 private:
  int m_;
  int tau_;
  std::vector<int> ones_;
};

/// Block-diagonal assembly diag{S_1, ..., S_L}. All schedules must share the
/// same state dimension.
Matrix network_selection(const std::vector<SelectionSchedule>& schedules);

/// Pattern sequences for steps 0..horizon, indexed [step][agent]. When
/// swap_step >= 0, the listed agents' schedules are replaced at that step
/// (they keep circular-shifting afterwards).
struct ScheduleSwap {
  std::vector<int> agents;
  std::vector<SelectionSchedule> replacements;
};
using SelectionTimeline = std::vector<std::vector<SelectionSchedule>>;
SelectionTimeline roll_schedules(std::vector<SelectionSchedule> initial, int horizon,
                                 int swap_step = -1, const ScheduleSwap* swap = nullptr);

}  // namespace brcdf
