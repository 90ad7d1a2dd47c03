// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/splat_ply.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "gsim/errors.hpp"

namespace gsim {

namespace {

std::vector<std::string> expected_properties(int degree) {
    std::vector<std::string> props = {"x", "y", "z", "nx", "ny", "nz",
                                      "f_dc_0", "f_dc_1", "f_dc_2"};
    const int rest = 3 * (sh_coeff_count(degree) - 1);
    for (int i = 0; i < rest; ++i) props.push_back("f_rest_" + std::to_string(i));
    props.push_back("opacity");
    for (int i = 0; i < 3; ++i) props.push_back("scale_" + std::to_string(i));
    for (int i = 0; i < 4; ++i) props.push_back("rot_" + std::to_string(i));
    return props;
}

int degree_from_rest_count(std::size_t rest) {
    for (int d = 0; d <= 3; ++d)
        if (rest == static_cast<std::size_t>(3 * (sh_coeff_count(d) - 1))) return d;
    return -1;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

GaussianField load_splat_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open splat PLY '" + path + "'");

    std::string line;
    if (!std::getline(in, line) || line != "ply")
        throw format_error("'" + path + "': missing 'ply' magic");
    bool format_seen = false;
    std::size_t count = 0;
    bool element_seen = false;
    bool header_closed = false;
    std::vector<std::string> props;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == "end_header") {
            header_closed = true;
            break;
        }
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment") continue;
        if (tok == "format") {
            std::string fmt, ver;
            ls >> fmt >> ver;
            if (fmt != "binary_little_endian")
                throw format_error("'" + path + "': format must be binary_little_endian, got '" +
                                   fmt + "'");
            format_seen = true;
        } else if (tok == "element") {
            std::string name;
            ls >> name >> count;
            if (name != "vertex")
                throw format_error("'" + path + "': unexpected element '" + name + "'");
            element_seen = true;
        } else if (tok == "property") {
            std::string type, name;
            ls >> type >> name;
            if (type != "float")
                throw format_error("'" + path + "': property '" + name +
                                   "' must be float, got '" + type + "'");
            props.push_back(name);
        } else if (!tok.empty()) {
            throw format_error("'" + path + "': unexpected header token '" + tok + "'");
        }
    }
    if (!header_closed) throw format_error("'" + path + "': header missing end_header");
    if (!format_seen) throw format_error("'" + path + "': header missing format line");
    if (!element_seen) throw format_error("'" + path + "': header missing element vertex line");

    // Degree is declared implicitly by the f_rest count; anything else is rejected.
    std::size_t rest_count = 0;
    for (const auto& p : props)
        if (p.rfind("f_rest_", 0) == 0) ++rest_count;
    const int degree = degree_from_rest_count(rest_count);
    if (degree < 0)
        throw format_error("'" + path + "': f_rest property count " +
                           std::to_string(rest_count) +
                           " does not match any SH degree in [0,3]");

    const std::vector<std::string> expected = expected_properties(degree);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= props.size())
            throw format_error("'" + path + "': missing property '" + expected[i] + "'");
        if (props[i] != expected[i])
            throw format_error("'" + path + "': expected property '" + expected[i] +
                               "' at position " + std::to_string(i) + ", found '" + props[i] +
                               "'");
    }
    if (props.size() > expected.size())
        throw format_error("'" + path + "': unexpected extra property '" +
                           props[expected.size()] + "'");

    const std::size_t stride = expected.size();
    std::vector<float> payload(count * stride);
    if (count > 0) {
        in.read(reinterpret_cast<char*>(payload.data()),
                static_cast<std::streamsize>(payload.size() * sizeof(float)));
        if (static_cast<std::size_t>(in.gcount()) != payload.size() * sizeof(float))
            throw format_error("'" + path + "': payload truncated");
    }

    GaussianField field;
    field.sh_degree = degree;
    field.primitives.resize(count);
    const int coeffs = sh_coeff_count(degree);
    const std::size_t rest_per_channel = static_cast<std::size_t>(coeffs - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const float* row = payload.data() + i * stride;
        for (std::size_t k = 0; k < stride; ++k)
            if (!std::isfinite(row[k]))
                throw validation_error("'" + path + "': non-finite value in primitive " +
                                       std::to_string(i));
        auto& p = field.primitives[i];
        p.mean = {row[0], row[1], row[2]};
        // normals (row[3..5]) carried on disk but ignored
        for (int c = 0; c < 3; ++c) p.set_sh(c, 0, row[6 + c]);
        const float* rest = row + 9;
        for (int c = 0; c < 3; ++c)
            for (std::size_t k = 0; k < rest_per_channel; ++k)
                p.set_sh(c, static_cast<int>(k) + 1, rest[c * rest_per_channel + k]);
        const float* tail = row + 9 + 3 * rest_per_channel;
        p.opacity = sigmoid(tail[0]);
        if (p.opacity <= 0.0 || p.opacity >= 1.0)
            throw validation_error("'" + path + "': opacity saturates in primitive " +
                                   std::to_string(i));
        p.scale = {std::exp(static_cast<double>(tail[1])),
                   std::exp(static_cast<double>(tail[2])),
                   std::exp(static_cast<double>(tail[3]))};
        if (!p.scale.finite())
            throw validation_error("'" + path + "': scale overflows in primitive " +
                                   std::to_string(i));
        Quat q{tail[4], tail[5], tail[6], tail[7]};
        const double n = q.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw validation_error("'" + path + "': zero-norm rotation in primitive " +
                                   std::to_string(i));
        // Keep already-normalized quaternions bit-exact for roundtrips.
        if (std::abs(n - 1.0) > 1e-6) q = q.normalized();
        p.rotation = q;
    }
    return field;
}

void save_splat_ply(const GaussianField& field, const std::string& path) {
    validate_field(field);

    const int coeffs = sh_coeff_count(field.sh_degree);
    const std::size_t rest_per_channel = static_cast<std::size_t>(coeffs - 1);
    const std::vector<std::string> props = expected_properties(field.sh_degree);

    std::ostringstream header;
    header << "ply\n"
           << "format binary_little_endian 1.0\n"
           << "element vertex " << field.size() << "\n";
    for (const auto& p : props) header << "property float " << p << "\n";
    header << "end_header\n";

    const std::size_t stride = props.size();
    std::vector<float> payload(field.size() * stride, 0.0f);
    for (std::size_t i = 0; i < field.size(); ++i) {
        const auto& p = field.primitives[i];
        float* row = payload.data() + i * stride;
        row[0] = static_cast<float>(p.mean.x);
        row[1] = static_cast<float>(p.mean.y);
        row[2] = static_cast<float>(p.mean.z);
        // row[3..5]: normals written as zeros
        for (int c = 0; c < 3; ++c) row[6 + c] = static_cast<float>(p.sh_at(c, 0));
        float* rest = row + 9;
        for (int c = 0; c < 3; ++c)
            for (std::size_t k = 0; k < rest_per_channel; ++k)
                rest[c * rest_per_channel + k] =
                    static_cast<float>(p.sh_at(c, static_cast<int>(k) + 1));
        float* tail = row + 9 + 3 * rest_per_channel;
        tail[0] = static_cast<float>(std::log(p.opacity / (1.0 - p.opacity)));
        tail[1] = static_cast<float>(std::log(p.scale.x));
        tail[2] = static_cast<float>(std::log(p.scale.y));
        tail[3] = static_cast<float>(std::log(p.scale.z));
        tail[4] = static_cast<float>(p.rotation.w);
        tail[5] = static_cast<float>(p.rotation.x);
        tail[6] = static_cast<float>(p.rotation.y);
        tail[7] = static_cast<float>(p.rotation.z);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    const std::string head = header.str();
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    if (!payload.empty())
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace gsim
