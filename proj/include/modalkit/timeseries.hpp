#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace modalkit {

enum class ChannelRole { State, Input };

struct Channel {
    std::string name;
    ChannelRole role;
    Eigen::VectorXd values;
};

/// Uniformly sampled multichannel record. Immutable by convention after
/// construction; all channels share one length and one sample interval.
struct TimeSeries {
    std::vector<Channel> channels;
    double dt = 0.0;
    double t0 = 0.0;

    Eigen::Index length() const {
        return channels.empty() ? 0 : channels.front().values.size();
    }

    int count_role(ChannelRole role) const {
        int c = 0;
        for (const auto& ch : channels)
            if (ch.role == role) ++c;
        return c;
    }

    const Channel* find(const std::string& name) const {
        for (const auto& ch : channels)
            if (ch.name == name) return &ch;
        return nullptr;
    }
};

}  // namespace modalkit
