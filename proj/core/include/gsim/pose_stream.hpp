// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "gsim/math.hpp"

namespace gsim {

struct PoseRecord {
    double t = 0.0;  // seconds
    std::string node;
    RigidTransform pose;
};

// Timestamped rigid transforms per node; the adapter contract by which any
// physics engine drives the renderer. File format is line-delimited JSON:
//   {"t": <sec>, "node": "<id>", "p": [x,y,z], "q": [w,x,y,z]}
class PoseStream {
public:
    PoseStream() = default;
    explicit PoseStream(std::vector<PoseRecord> records);

    // Throws format_error on malformed lines, validation_error on non-finite
    // values or timestamps that decrease within a node.
    static PoseStream load(const std::string& path);
    void save(const std::string& path) const;

    void append(const PoseRecord& rec);

    bool has_node(const std::string& node) const;
    std::vector<std::string> node_ids() const;
    std::size_t size() const { return total_; }

    // Pose at time t: linear translation and shortest-arc slerp between the
    // bracketing records; initial_pose before the first record, last record
    // held after the stream ends.
    RigidTransform sample(const std::string& node, double t,
                          const RigidTransform& initial_pose) const;

private:
    std::map<std::string, std::vector<PoseRecord>> per_node_;
    std::size_t total_ = 0;
};

}  // namespace gsim
