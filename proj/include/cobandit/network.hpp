#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "cobandit/env.hpp"
#include "cobandit/policies.hpp"

// Delayed broadcast fabric between agents. Every enqueued message counts
// toward the communication total C_T, observations and elimination notices
// alike. A message emitted at round t with pairwise delay d becomes
// deliverable at round t + max(d, 1), so nothing emitted in a round can act
// within that same round.

namespace cobandit {

enum class MessageKind { Observation, Elimination };

struct Message {
    MessageKind kind = MessageKind::Observation;
    Agent origin = 0;
    Agent recipient = 0;
    Arm arm = 0;            // observation payload
    int reward = 0;         // observation payload
    std::vector<Arm> arms;  // elimination payload
    Round emit = 0;
    Round arrival = 0;
    std::uint64_t seq = 0;  // global emission order, breaks arrival ties
};

class DelayedBus {
public:
    explicit DelayedBus(const Instance& instance, bool keep_log = false);

    // One observation per other agent whose local set contains the arm.
    // Returns the number of messages enqueued (M_arm - 1 for a local pull).
    std::int64_t broadcast_observation_ucb(Agent origin, Arm arm, int reward, Round t);

    // CO-AAE rules: nothing when the origin's own candidate set has <= 1
    // arms; otherwise one observation per other agent whose (possibly stale)
    // viewed candidate set contains the arm and has more than one arm.
    std::int64_t broadcast_observation_aae(Agent origin, Arm arm, int reward, Round t,
                                           const CandidateSet& cands);

    // One elimination notice (carrying the batched arm list) to every other
    // agent. Returns M - 1.
    std::int64_t broadcast_elimination(Agent origin, const std::vector<Arm>& arms, Round t);

    // All messages for `recipient` with arrival <= t, ordered by
    // (arrival, emission order), removed from the pending structure.
    std::vector<Message> deliver(Agent recipient, Round t);

    std::int64_t sent_count() const { return sent_count_; }          // C_T
    std::int64_t observation_count() const { return observation_count_; }
    std::int64_t elimination_count() const { return elimination_count_; }
    std::int64_t delivered_count() const { return delivered_count_; }
    std::int64_t in_flight() const { return sent_count_ - delivered_count_; }

    const std::vector<Message>& log() const { return log_; }

private:
    void enqueue(Message msg);

    struct ArrivalOrder {
        bool operator()(const Message& a, const Message& b) const {
            if (a.arrival != b.arrival) return a.arrival > b.arrival;
            return a.seq > b.seq;
        }
    };

    const Instance* instance_;
    bool keep_log_;
    std::uint64_t next_seq_ = 0;
    std::int64_t sent_count_ = 0;
    std::int64_t observation_count_ = 0;
    std::int64_t elimination_count_ = 0;
    std::int64_t delivered_count_ = 0;
    std::vector<std::priority_queue<Message, std::vector<Message>, ArrivalOrder>> pending_;
    std::vector<Message> log_;
};

// Line-delimited dump of every message ever enqueued, in emission order.
std::string message_log_text(const std::vector<Message>& log);

} // namespace cobandit
