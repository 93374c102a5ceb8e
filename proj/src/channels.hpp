#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>

namespace recweave::channels {

// Single-slot rendezvous channels for exactly two parties. Every
// blocking wait converts to errc::timeout after `timeout`, so a protocol
// bug surfaces as a failing check instead of a hang.

enum class OpSite { probe_put, probe_get, inject_put, inject_get, inject_swap_in, inject_swap_out };

struct ChannelEvent {
  OpSite site;
  int64_t value;     // what the caller handed in
  int64_t returned;  // what the caller got back (get and swaps)
};

// Invoked at the commit point, with the channel lock held — events are
// observed in the exact order the channel serialized them.
using Observer = std::function<void(const ChannelEvent&)>;

// Invoked at operation entry, before locking. The runtime hangs its
// adversarial scheduling off this.
using PreOpHook = std::function<void(OpSite)>;

enum class FaultKind { none, drop_put, duplicate_put };

// Strict producer/consumer alternation: put blocks while a value is
// pending, get blocks while none is.
class ProbeChannel {
 public:
  explicit ProbeChannel(std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

  void put(int64_t v);
  int64_t get();

  void set_observer(Observer o) { observer_ = std::move(o); }
  void set_pre_op_hook(PreOpHook h) { pre_op_ = std::move(h); }

  // Sabotage the index-th put (1-based): drop it silently or deliver it
  // twice. Exists to prove the run verifier catches protocol damage.
  void arm_fault(FaultKind kind, uint64_t put_index);

 private:
  void deliver(int64_t v, std::unique_lock<std::mutex>& lock);

  std::mutex m_;
  std::condition_variable cv_;
  std::chrono::milliseconds timeout_;
  int64_t slot_ = 0;
  bool available_ = false;
  Observer observer_;
  PreOpHook pre_op_;
  FaultKind fault_ = FaultKind::none;
  uint64_t fault_index_ = 0;
  uint64_t puts_seen_ = 0;
};

// Asymmetric slot with a `not_set` flag:
//   put      waits for not_set, stores, clears the flag
//   get      waits for a value, reads it, leaves the flag alone
//   swap_in  waits for a value, exchanges, leaves the flag alone
//   swap_out exchanges without waiting and raises the flag
class InjectChannel {
 public:
  explicit InjectChannel(std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

  void put(int64_t v);
  int64_t get();
  int64_t swap_in(int64_t v);
  int64_t swap_out(int64_t v);

  // Post-run inspection.
  int64_t slot() const;
  bool not_set() const;

  void set_observer(Observer o) { observer_ = std::move(o); }
  void set_pre_op_hook(PreOpHook h) { pre_op_ = std::move(h); }

 private:
  mutable std::mutex m_;
  std::condition_variable cv_;
  std::chrono::milliseconds timeout_;
  int64_t slot_ = 0;
  bool not_set_ = true;
  Observer observer_;
  PreOpHook pre_op_;
};

}  // namespace recweave::channels
