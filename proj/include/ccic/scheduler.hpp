#ifndef CCIC_SCHEDULER_HPP
#define CCIC_SCHEDULER_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "ccic/errors.hpp"

namespace ccic {

// Deterministic event queue: events run in (time, seq) order, where seq is
// the scheduling order. Processing never schedules into the past.
class Scheduler {
public:
  double now() const { return now_; }

  void schedule_at(double time, std::function<void()> fn) {
    if (time < now_)
      throw Error(Errc::BadConfig, "event scheduled into the past");
    queue_.push(Item{time, next_seq_++, std::move(fn)});
  }

  void schedule_in(double delay, std::function<void()> fn) {
    schedule_at(now_ + delay, std::move(fn));
  }

  bool step() {
    if (queue_.empty()) return false;
    Item item = queue_.top();
    queue_.pop();
    now_ = item.time;
    item.fn();
    ++processed_;
    return true;
  }

  // Runs every event with time <= end, then advances the clock to end.
  void run_until(double end) {
    while (!queue_.empty() && queue_.top().time <= end) step();
    if (end > now_) now_ = end;
  }

  bool empty() const { return queue_.empty(); }
  std::uint64_t processed() const { return processed_; }
  double next_time() const { return queue_.empty() ? -1.0 : queue_.top().time; }

private:
  struct Item {
    double time;
    std::uint64_t seq;
    std::function<void()> fn;

    bool operator>(const Item& o) const {
      if (time != o.time) return time > o.time;
      return seq > o.seq;
    }
  };

  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue_;
  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
};

} // namespace ccic

#endif
