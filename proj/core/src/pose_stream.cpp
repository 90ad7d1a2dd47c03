// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/pose_stream.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gsim/errors.hpp"

namespace gsim {

using json = nlohmann::json;

namespace {

void check_record(const PoseRecord& rec, const std::string& context) {
    if (!std::isfinite(rec.t))
        throw validation_error(context + ": non-finite timestamp");
    if (!rec.pose.translation.finite() || !rec.pose.rotation.finite())
        throw validation_error(context + ": non-finite pose for node '" + rec.node + "'");
    if (rec.node.empty()) throw validation_error(context + ": empty node id");
}

}  // namespace

PoseStream::PoseStream(std::vector<PoseRecord> records) {
    for (const auto& rec : records) append(rec);
}

void PoseStream::append(const PoseRecord& rec) {
    check_record(rec, "pose stream");
    auto& track = per_node_[rec.node];
    if (!track.empty() && rec.t < track.back().t)
        throw validation_error("pose stream: timestamps decrease for node '" + rec.node + "'");
    PoseRecord r = rec;
    r.pose.rotation = r.pose.rotation.normalized();
    track.push_back(std::move(r));
    ++total_;
}

PoseStream PoseStream::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open pose stream '" + path + "'");
    PoseStream stream;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw format_error("'" + path + "' line " + std::to_string(line_no) + ": " +
                               e.what());
        }
        if (!j.contains("t") || !j.contains("node") || !j.contains("p") || !j.contains("q"))
            throw format_error("'" + path + "' line " + std::to_string(line_no) +
                               ": record needs t, node, p, q");
        PoseRecord rec;
        try {
            rec.t = j.at("t").get<double>();
            rec.node = j.at("node").get<std::string>();
            const auto p = j.at("p").get<std::vector<double>>();
            const auto q = j.at("q").get<std::vector<double>>();
            if (p.size() != 3 || q.size() != 4)
                throw format_error("'" + path + "' line " + std::to_string(line_no) +
                                   ": p must have 3 and q 4 entries");
            rec.pose.translation = {p[0], p[1], p[2]};
            rec.pose.rotation = {q[0], q[1], q[2], q[3]};
        } catch (const json::exception& e) {
            throw format_error("'" + path + "' line " + std::to_string(line_no) + ": " +
                               e.what());
        }
        check_record(rec, "'" + path + "' line " + std::to_string(line_no));
        stream.append(rec);
    }
    return stream;
}

void PoseStream::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    // Interleave tracks in time order so the file replays like a recording.
    std::vector<const PoseRecord*> all;
    all.reserve(total_);
    for (const auto& [node, track] : per_node_)
        for (const auto& rec : track) all.push_back(&rec);
    std::stable_sort(all.begin(), all.end(),
                     [](const PoseRecord* a, const PoseRecord* b) { return a->t < b->t; });
    for (const PoseRecord* rec : all) {
        json j{{"t", rec->t},
               {"node", rec->node},
               {"p", {rec->pose.translation.x, rec->pose.translation.y, rec->pose.translation.z}},
               {"q", {rec->pose.rotation.w, rec->pose.rotation.x, rec->pose.rotation.y,
                      rec->pose.rotation.z}}};
        out << j.dump() << "\n";
    }
    if (!out) throw io_error("write failed for '" + path + "'");
}

bool PoseStream::has_node(const std::string& node) const {
    return per_node_.find(node) != per_node_.end();
}

std::vector<std::string> PoseStream::node_ids() const {
    std::vector<std::string> ids;
    ids.reserve(per_node_.size());
    for (const auto& [node, track] : per_node_) ids.push_back(node);
    return ids;
}

RigidTransform PoseStream::sample(const std::string& node, double t,
                                  const RigidTransform& initial_pose) const {
    const auto it = per_node_.find(node);
    if (it == per_node_.end() || it->second.empty()) return initial_pose;
    const auto& track = it->second;
    if (t < track.front().t) return initial_pose;
    if (t >= track.back().t) return track.back().pose;
    // First record with time > t; its predecessor brackets from below.
    const auto hi = std::upper_bound(
        track.begin(), track.end(), t,
        [](double value, const PoseRecord& rec) { return value < rec.t; });
    const auto lo = hi - 1;
    const double span = hi->t - lo->t;
    if (span <= 0.0) return hi->pose;
    const double u = (t - lo->t) / span;
    RigidTransform out;
    out.translation = lo->pose.translation * (1.0 - u) + hi->pose.translation * u;
    out.rotation = slerp(lo->pose.rotation, hi->pose.rotation, u);
    return out;
}

}  // namespace gsim
