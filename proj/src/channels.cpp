#include "channels.hpp"

#include "errors.hpp"

namespace recweave::channels {

ProbeChannel::ProbeChannel(std::chrono::milliseconds timeout) : timeout_(timeout) {}

void ProbeChannel::arm_fault(FaultKind kind, uint64_t put_index) {
  fault_ = kind;
  fault_index_ = put_index;
}

void ProbeChannel::deliver(int64_t v, std::unique_lock<std::mutex>& lock) {
  if (!cv_.wait_for(lock, timeout_, [&] { return !available_; }))
    fail(errc::timeout, "probe.put: receiver never drained the slot");
  slot_ = v;
  available_ = true;
  if (observer_) observer_({OpSite::probe_put, v, v});
  cv_.notify_all();
}

void ProbeChannel::put(int64_t v) {
  if (pre_op_) pre_op_(OpSite::probe_put);
  std::unique_lock lock(m_);
  uint64_t index = ++puts_seen_;
  if (fault_ != FaultKind::none && index == fault_index_) {
    if (fault_ == FaultKind::drop_put) return;  // vanish: no rendezvous, no event
    deliver(v, lock);                           // duplicate: deliver twice
  }
  deliver(v, lock);
}

int64_t ProbeChannel::get() {
  if (pre_op_) pre_op_(OpSite::probe_get);
  std::unique_lock lock(m_);
  if (!cv_.wait_for(lock, timeout_, [&] { return available_; }))
    fail(errc::timeout, "probe.get: no value arrived");
  int64_t v = slot_;
  available_ = false;
  if (observer_) observer_({OpSite::probe_get, v, v});
  cv_.notify_all();
  return v;
}

InjectChannel::InjectChannel(std::chrono::milliseconds timeout) : timeout_(timeout) {}

void InjectChannel::put(int64_t v) {
  if (pre_op_) pre_op_(OpSite::inject_put);
  std::unique_lock lock(m_);
  if (!cv_.wait_for(lock, timeout_, [&] { return not_set_; }))
    fail(errc::timeout, "inject.put: slot already holds a value");
  slot_ = v;
  not_set_ = false;
  if (observer_) observer_({OpSite::inject_put, v, v});
  cv_.notify_all();
}

int64_t InjectChannel::get() {
  if (pre_op_) pre_op_(OpSite::inject_get);
  std::unique_lock lock(m_);
  if (!cv_.wait_for(lock, timeout_, [&] { return !not_set_; }))
    fail(errc::timeout, "inject.get: no value was put");
  int64_t v = slot_;  // the flag stays down: reads do not consume
  if (observer_) observer_({OpSite::inject_get, v, v});
  cv_.notify_all();
  return v;
}

int64_t InjectChannel::swap_in(int64_t v) {
  if (pre_op_) pre_op_(OpSite::inject_swap_in);
  std::unique_lock lock(m_);
  if (!cv_.wait_for(lock, timeout_, [&] { return !not_set_; }))
    fail(errc::timeout, "inject.swap_in: no value was put");
  int64_t old = slot_;
  slot_ = v;  // exchange only; the flag stays down
  if (observer_) observer_({OpSite::inject_swap_in, v, old});
  cv_.notify_all();
  return old;
}

int64_t InjectChannel::swap_out(int64_t v) {
  if (pre_op_) pre_op_(OpSite::inject_swap_out);
  std::unique_lock lock(m_);
  int64_t old = slot_;  // no wait: this is the producer's parting move
  slot_ = v;
  not_set_ = !not_set_;
  if (observer_) observer_({OpSite::inject_swap_out, v, old});
  cv_.notify_all();
  return old;
}

int64_t InjectChannel::slot() const {
  std::lock_guard lock(m_);
  return slot_;
}

bool InjectChannel::not_set() const {
  std::lock_guard lock(m_);
  return not_set_;
}

}  // namespace recweave::channels
