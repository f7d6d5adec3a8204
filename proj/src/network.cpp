#include "cobandit/network.hpp"

#include <algorithm>
#include <sstream>

namespace cobandit {

DelayedBus::DelayedBus(const Instance& instance, bool keep_log)
    : instance_(&instance),
      keep_log_(keep_log),
      pending_(static_cast<std::size_t>(instance.num_agents)) {}

void DelayedBus::enqueue(Message msg) {
    msg.seq = next_seq_++;
    ++sent_count_;
    if (msg.kind == MessageKind::Observation)
        ++observation_count_;
    else
        ++elimination_count_;
    if (keep_log_) log_.push_back(msg);
    pending_[static_cast<std::size_t>(msg.recipient)].push(std::move(msg));
}

std::int64_t DelayedBus::broadcast_observation_ucb(Agent origin, Arm arm, int reward,
                                                   Round t) {
    std::int64_t sent = 0;
    for (Agent j = 0; j < instance_->num_agents; ++j) {
        if (j == origin || !instance_->is_local(j, arm)) continue;
        Message msg;
        msg.kind = MessageKind::Observation;
        msg.origin = origin;
        msg.recipient = j;
        msg.arm = arm;
        msg.reward = reward;
        msg.emit = t;
        auto d = instance_->delay_matrix[static_cast<std::size_t>(origin)]
                                        [static_cast<std::size_t>(j)];
        msg.arrival = t + std::max<std::int64_t>(d, 1);
        enqueue(std::move(msg));
        ++sent;
    }
    return sent;
}

std::int64_t DelayedBus::broadcast_observation_aae(Agent origin, Arm arm, int reward,
                                                   Round t, const CandidateSet& cands) {
    if (cands.own_size() <= 1) return 0;
    std::int64_t sent = 0;
    for (Agent j = 0; j < instance_->num_agents; ++j) {
        if (j == origin) continue;
        if (cands.peer_size(j) <= 1 || !cands.peer_contains(j, arm)) continue;
        Message msg;
        msg.kind = MessageKind::Observation;
        msg.origin = origin;
        msg.recipient = j;
        msg.arm = arm;
        msg.reward = reward;
        msg.emit = t;
        auto d = instance_->delay_matrix[static_cast<std::size_t>(origin)]
                                        [static_cast<std::size_t>(j)];
        msg.arrival = t + std::max<std::int64_t>(d, 1);
        enqueue(std::move(msg));
        ++sent;
    }
    return sent;
}

std::int64_t DelayedBus::broadcast_elimination(Agent origin, const std::vector<Arm>& arms,
                                               Round t) {
    std::int64_t sent = 0;
    for (Agent j = 0; j < instance_->num_agents; ++j) {
        if (j == origin) continue;
        Message msg;
        msg.kind = MessageKind::Elimination;
        msg.origin = origin;
        msg.recipient = j;
        msg.arms = arms;
        msg.emit = t;
        auto d = instance_->delay_matrix[static_cast<std::size_t>(origin)]
                                        [static_cast<std::size_t>(j)];
        msg.arrival = t + std::max<std::int64_t>(d, 1);
        enqueue(std::move(msg));
        ++sent;
    }
    return sent;
}

std::vector<Message> DelayedBus::deliver(Agent recipient, Round t) {
    auto& queue = pending_[static_cast<std::size_t>(recipient)];
    std::vector<Message> out;
    while (!queue.empty() && queue.top().arrival <= t) {
        out.push_back(queue.top());
        queue.pop();
    }
    delivered_count_ += static_cast<std::int64_t>(out.size());
    return out;
}

std::string message_log_text(const std::vector<Message>& log) {
    std::ostringstream out;
    for (const auto& m : log) {
        if (m.kind == MessageKind::Observation) {
            out << "obs " << m.origin << " " << m.recipient << " " << m.arm << " "
                << m.reward << " " << m.emit << " " << m.arrival << "\n";
        } else {
            out << "elim " << m.origin << " " << m.recipient << " " << m.emit << " "
                << m.arrival;
            for (Arm a : m.arms) out << " " << a;
            out << "\n";
        }
    }
    return out.str();
}

} // namespace cobandit
