#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "edgesim/events.hpp"
#include "edgesim/time.hpp"

namespace edgesim {

class SimLoop;

class SimClock {
 public:
  Tick now() const { return now_; }

 private:
  friend class SimLoop;
  Tick now_ = 0;
};

struct BusMessage {
  std::string topic;
  EventPayload payload;
  Tick publish_tick = 0;
  std::uint64_t seq = 0;  // per-topic, assigned when the message becomes deliverable
};

using MessageHandler = std::function<void(const BusMessage&)>;

// In-process broker standing in for the external message bus. Delivery is
// exactly-once FIFO per topic: pending messages drain in (topic, seq) order,
// and a subscriber only ever sees messages published after it subscribed.
class MessageBus {
 public:
  explicit MessageBus(std::vector<std::string> topics = default_topics());

  static std::vector<std::string> default_topics();

  // Makes the message deliverable on the current tick; returns its seq.
  std::uint64_t publish(const std::string& topic, EventPayload payload);

  // Defers the publish to tick `at` (at >= now).
  void schedule(Tick at, const std::string& topic, EventPayload payload);

  int subscribe(const std::string& topic, MessageHandler handler);

  // Observes every message as it becomes deliverable (publish order).
  void set_log_sink(std::function<void(const BusMessage&)> sink) { log_sink_ = std::move(sink); }

  std::uint64_t published_count(const std::string& topic) const;

 private:
  friend class SimLoop;

  struct Subscriber {
    int id;
    std::uint64_t min_seq;  // ignore messages enqueued before subscription
    MessageHandler handler;
  };

  struct Topic {
    std::uint64_t next_seq = 1;
    std::deque<BusMessage> pending;
    std::vector<Subscriber> subscribers;
  };

  void bind(const SimClock* clock) { clock_ = clock; }
  Topic& topic_or_throw(const std::string& name);
  std::uint64_t enqueue(const std::string& name, Topic& topic, EventPayload payload);
  void activate_due(Tick now);
  bool drain_one();
  void drain_all();

  std::map<std::string, Topic> topics_;
  std::map<Tick, std::vector<std::pair<std::string, EventPayload>>> deferred_;
  std::function<void(const BusMessage&)> log_sink_;
  const SimClock* clock_ = nullptr;
  int next_subscriber_id_ = 1;
};

// Single-threaded deterministic event loop. Each tick runs due timers in
// ascending (priority, registration order) and drains bus deliveries after
// every priority level, so handlers run to completion and cascaded
// same-tick publishes are delivered before the clock advances.
class SimLoop {
 public:
  SimLoop();

  SimClock& clock() { return clock_; }
  const SimClock& clock() const { return clock_; }
  MessageBus& bus() { return bus_; }

  using TimerFn = std::function<void(Tick)>;

  // Recurring timer, fired once per tick starting at the next processed tick.
  void every_tick(int priority, TimerFn fn);

  // One-shot timer at a strictly future tick.
  void call_at(Tick at, int priority, TimerFn fn);

  // Runs ticks [now, end); afterwards now() == end.
  void run_until(Tick end);

 private:
  struct Timer {
    int priority;
    std::uint64_t order;
    TimerFn fn;
  };

  void run_tick(Tick t);

  SimClock clock_;
  MessageBus bus_;
  std::deque<Timer> recurring_;  // deque: stable element addresses under registration
  std::map<Tick, std::vector<Timer>> one_shot_;
  std::uint64_t next_order_ = 0;
};

}  // namespace edgesim
