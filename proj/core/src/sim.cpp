#include "edgesim/sim.hpp"

#include <algorithm>

#include "edgesim/errors.hpp"

namespace edgesim {

MessageBus::MessageBus(std::vector<std::string> topics) {
  for (auto& t : topics) topics_.emplace(std::move(t), Topic{});
}

std::vector<std::string> MessageBus::default_topics() {
  return {kTopicNodeState, kTopicNodeResources, kTopicPrediction, kTopicActions};
}

MessageBus::Topic& MessageBus::topic_or_throw(const std::string& name) {
  auto it = topics_.find(name);
  if (it == topics_.end()) throw UnknownTopic("unknown topic: " + name);
  return it->second;
}

std::uint64_t MessageBus::enqueue(const std::string& name, Topic& topic, EventPayload payload) {
  BusMessage msg;
  msg.topic = name;
  msg.payload = std::move(payload);
  msg.publish_tick = clock_ ? clock_->now() : 0;
  msg.seq = topic.next_seq++;
  if (log_sink_) log_sink_(msg);
  topic.pending.push_back(std::move(msg));
  return topic.pending.back().seq;
}

std::uint64_t MessageBus::publish(const std::string& topic, EventPayload payload) {
  return enqueue(topic, topic_or_throw(topic), std::move(payload));
}

void MessageBus::schedule(Tick at, const std::string& topic, EventPayload payload) {
  Topic& t = topic_or_throw(topic);
  const Tick now = clock_ ? clock_->now() : 0;
  if (at < now) throw SchedulingInPast("schedule target tick is in the past");
  if (at == now) {
    enqueue(topic, t, std::move(payload));
  } else {
    deferred_[at].emplace_back(topic, std::move(payload));
  }
}

int MessageBus::subscribe(const std::string& topic, MessageHandler handler) {
  Topic& t = topic_or_throw(topic);
  const int id = next_subscriber_id_++;
  t.subscribers.push_back(Subscriber{id, t.next_seq, std::move(handler)});
  return id;
}

std::uint64_t MessageBus::published_count(const std::string& topic) const {
  auto it = topics_.find(topic);
  if (it == topics_.end()) throw UnknownTopic("unknown topic: " + topic);
  return it->second.next_seq - 1;
}

void MessageBus::activate_due(Tick now) {
  while (!deferred_.empty() && deferred_.begin()->first <= now) {
    auto batch = std::move(deferred_.begin()->second);
    deferred_.erase(deferred_.begin());
    for (auto& [topic, payload] : batch) {
      enqueue(topic, topics_.at(topic), std::move(payload));
    }
  }
}

bool MessageBus::drain_one() {
  // Smallest topic name with a pending message == least (topic, seq), since
  // each topic queue is already in seq order.
  for (auto& [name, topic] : topics_) {
    if (topic.pending.empty()) continue;
    BusMessage msg = std::move(topic.pending.front());
    topic.pending.pop_front();
    // Snapshot: handlers may subscribe during delivery.
    const std::size_t n = topic.subscribers.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Subscriber& sub = topic.subscribers[i];
      if (msg.seq >= sub.min_seq) sub.handler(msg);
    }
    return true;
  }
  return false;
}

void MessageBus::drain_all() {
  while (drain_one()) {
  }
}

SimLoop::SimLoop() { bus_.bind(&clock_); }

void SimLoop::every_tick(int priority, TimerFn fn) {
  recurring_.push_back(Timer{priority, next_order_++, std::move(fn)});
}

void SimLoop::call_at(Tick at, int priority, TimerFn fn) {
  if (at <= clock_.now_) throw SchedulingInPast("one-shot timers must target a future tick");
  one_shot_[at].push_back(Timer{priority, next_order_++, std::move(fn)});
}

void SimLoop::run_tick(Tick t) {
  clock_.now_ = t;
  bus_.activate_due(t);
  bus_.drain_all();

  std::vector<const Timer*> due;
  due.reserve(recurring_.size());
  for (const Timer& timer : recurring_) due.push_back(&timer);
  auto it = one_shot_.find(t);
  if (it != one_shot_.end()) {
    for (const Timer& timer : it->second) due.push_back(&timer);
  }
  std::stable_sort(due.begin(), due.end(), [](const Timer* a, const Timer* b) {
    return a->priority != b->priority ? a->priority < b->priority : a->order < b->order;
  });

  std::size_t i = 0;
  while (i < due.size()) {
    const int prio = due[i]->priority;
    for (; i < due.size() && due[i]->priority == prio; ++i) due[i]->fn(t);
    bus_.drain_all();
  }
  bus_.drain_all();
  one_shot_.erase(t);
}

void SimLoop::run_until(Tick end) {
  for (Tick t = clock_.now_; t < end; ++t) run_tick(t);
  if (end > clock_.now_) clock_.now_ = end;
}

}  // namespace edgesim
