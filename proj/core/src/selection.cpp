#include "brcdf/selection.hpp"

#include <algorithm>
#include <numeric>

#include "brcdf/errors.hpp"

namespace brcdf {

SelectionSchedule::SelectionSchedule(int state_dim, int shift, std::vector<int> ones)
    : m_(state_dim), tau_(shift), ones_(std::move(ones)) {
  if (m_ < 1) throw ConfigError("selection: state dimension must be positive");
  if (tau_ < 0) throw ConfigError("selection: shift must be non-negative");
  if (ones_.empty() || static_cast<int>(ones_.size()) > m_)
    throw ConfigError("selection: shared count must lie in [1, state dimension]");
  std::sort(ones_.begin(), ones_.end());
  if (std::adjacent_find(ones_.begin(), ones_.end()) != ones_.end())
    throw ConfigError("selection: duplicate index in pattern");
  if (ones_.front() < 0 || ones_.back() >= m_)
    throw ConfigError("selection: pattern index out of range");
}

SelectionSchedule SelectionSchedule::random(int state_dim, int shared_count, int shift,
                                            RngStream& rng) {
  if (shared_count < 1 || shared_count > state_dim)
    throw ConfigError("selection: shared count must lie in [1, state dimension]");
  // Partial Fisher-Yates over 0..m-1.
  std::vector<int> pool(state_dim);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < shared_count; ++i) {
    const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(state_dim - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(shared_count);
  return SelectionSchedule(state_dim, shift, std::move(pool));
}

SelectionSchedule SelectionSchedule::from_pattern(const std::string& pattern, int shift) {
  std::vector<int> ones;
  for (int i = 0; i < static_cast<int>(pattern.size()); ++i) {
    if (pattern[i] == '1')
      ones.push_back(i);
    else if (pattern[i] != '0')
      throw ConfigError("selection: pattern must contain only 0 and 1");
  }
  return SelectionSchedule(static_cast<int>(pattern.size()), shift, std::move(ones));
}

bool SelectionSchedule::uniform_coverage() const { return std::gcd(tau_, m_) == 1; }

bool SelectionSchedule::selects(int coordinate) const {
  return std::binary_search(ones_.begin(), ones_.end(), coordinate);
}

SelectionSchedule SelectionSchedule::advanced() const {
  SelectionSchedule next = *this;
  next.advance();
  return next;
}

void SelectionSchedule::advance() {
  for (int& index : ones_) index = (index + tau_) % m_;
  std::sort(ones_.begin(), ones_.end());
}

Vector SelectionSchedule::diagonal() const {
  Vector d = Vector::Zero(m_);
  for (int index : ones_) d[index] = 1.0;
  return d;
}

Matrix SelectionSchedule::matrix() const {
  Matrix s = Matrix::Zero(m_, m_);
  for (int index : ones_) s(index, index) = 1.0;
  return s;
}

Vector SelectionSchedule::mask(const Vector& x) const {
  Vector out = Vector::Zero(x.size());
  for (int index : ones_) out[index] = x[index];
  return out;
}

std::string SelectionSchedule::pattern_string() const {
  std::string text(m_, '0');
  for (int index : ones_) text[index] = '1';
  return text;
}

Matrix network_selection(const std::vector<SelectionSchedule>& schedules) {
  if (schedules.empty()) throw ConfigError("network_selection: empty schedule list");
  const int m = schedules.front().state_dim();
  for (const auto& s : schedules)
    if (s.state_dim() != m)
      throw ConfigError("network_selection: schedules must share the state dimension");
  const int count = static_cast<int>(schedules.size());
  Matrix out = Matrix::Zero(count * m, count * m);
  for (int a = 0; a < count; ++a)
    for (int index : schedules[a].ones()) out(a * m + index, a * m + index) = 1.0;
  return out;
}

SelectionTimeline roll_schedules(std::vector<SelectionSchedule> initial, int horizon,
                                 int swap_step, const ScheduleSwap* swap) {
  SelectionTimeline timeline;
  timeline.reserve(horizon + 1);
  timeline.push_back(initial);
  for (int k = 1; k <= horizon; ++k) {
    for (auto& sched : initial) sched.advance();
    if (swap != nullptr && k == swap_step) {
      for (std::size_t idx = 0; idx < swap->agents.size(); ++idx)
        initial[swap->agents[idx]] = swap->replacements[idx];
    }
    timeline.push_back(initial);
  }
  return timeline;
}

}  // namespace brcdf
