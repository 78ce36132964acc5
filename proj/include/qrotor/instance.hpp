#pragma once

// Problem input: a weighted interaction graph plus the rotor parameters
// (k, a, b, c_pot). File format is JSON:
//
//   { "k": 2, "a": 1.0, "b": 1.0, "c_pot": 2.0,
//     "edges": [[0, 1, 1.0], ...], "n": 2 }
//
// Vertex ids are 0-based; edge weights default to 1; "n" is optional and
// defaults to max vertex id + 1 (required for edgeless instances).

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace qrotor {

struct Edge {
    int u = 0;
    int v = 0;
    double weight = 1.0;
};

struct RotorInstance {
    int n = 0;
    std::vector<Edge> edges;
    int k = 2;
    double a = 1.0;
    double b = 1.0;
    double c_pot = 2.0;

    void validate() const {
        if (n < 1) throw std::invalid_argument("instance: need at least one vertex");
        if (k < 2) throw std::invalid_argument("instance: need k >= 2");
        if (a < 0 || b < 0) throw std::invalid_argument("instance: a, b must be nonnegative");
        for (const auto& e : edges) {
            if (e.u == e.v) throw std::invalid_argument("instance: self-loop");
            if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
                throw std::invalid_argument("instance: vertex id out of range");
        }
    }

    bool has_negative_weight() const {
        for (const auto& e : edges)
            if (e.weight < 0) return true;
        return false;
    }

    double total_weight() const {
        double w = 0;
        for (const auto& e : edges) w += e.weight;
        return w;
    }
};

class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline RotorInstance parse_instance(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw InstanceError("instance parse error at line " + std::to_string(line) + ": " +
                            e.what());
    }
    RotorInstance inst;
    try {
        inst.k = j.at("k").get<int>();
        inst.a = j.at("a").get<double>();
        inst.b = j.at("b").get<double>();
        if (j.contains("c_pot")) inst.c_pot = j.at("c_pot").get<double>();
        int max_id = -1;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3)
                throw InstanceError("instance: each edge must be [u, v] or [u, v, w]");
            Edge edge;
            edge.u = e[0].get<int>();
            edge.v = e[1].get<int>();
            if (e.size() == 3) edge.weight = e[2].get<double>();
            max_id = std::max({max_id, edge.u, edge.v});
            inst.edges.push_back(edge);
        }
        inst.n = j.contains("n") ? j.at("n").get<int>() : max_id + 1;
    } catch (const nlohmann::json::exception& e) {
        throw InstanceError(std::string("instance: ") + e.what());
    }
    try {
        inst.validate();
    } catch (const std::invalid_argument& e) {
        throw InstanceError(e.what());
    }
    return inst;
}

inline RotorInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InstanceError("cannot open instance file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

}  // namespace qrotor
