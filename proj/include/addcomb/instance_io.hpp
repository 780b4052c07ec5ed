#pragma once

// Instance documents: {"group": {"factors": [...]}, "A": [[...],...], "S": [[...],...]}
// with elements spelled as residue arrays in factor order.

#include <optional>
#include <string>

#include <json.hpp>

#include "addcomb/group.hpp"

namespace addcomb {

struct Instance {
    GroupSpec group;
    GroupSet A;
    GroupSet S;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline GroupSet parse_set(const GroupSpec& g, const nlohmann::json& arr, const std::string& name) {
    if (!arr.is_array()) throw ParseError("instance: \"" + name + "\" must be an array of elements");
    GroupSet s(g);
    for (size_t i = 0; i < arr.size(); ++i) {
        const auto& el = arr[i];
        if (!el.is_array()) throw ParseError("instance: " + name + "[" + std::to_string(i) + "] must be a residue array");
        std::vector<std::uint32_t> res;
        res.reserve(el.size());
        for (size_t j = 0; j < el.size(); ++j) {
            if (!el[j].is_number_integer())
                throw ParseError("instance: " + name + "[" + std::to_string(i) + "][" + std::to_string(j) +
                                 "] must be an integer");
            const auto v = el[j].get<std::int64_t>();
            if (v < 0) throw ParseError("instance: " + name + "[" + std::to_string(i) + "][" + std::to_string(j) +
                                        "] is negative");
            res.push_back(static_cast<std::uint32_t>(v));
        }
        try {
            s.insert(g.index_of(res));
        } catch (const std::invalid_argument& e) {
            throw ParseError("instance: " + name + "[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return s;
}

}  // namespace detail

inline Instance parse_instance(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("instance: ") + e.what());
    }
    if (!doc.contains("group") || !doc["group"].contains("factors"))
        throw ParseError("instance: missing group.factors");
    std::vector<std::uint32_t> factors;
    for (const auto& f : doc["group"]["factors"]) {
        if (!f.is_number_integer() || f.get<std::int64_t>() < 1)
            throw ParseError("instance: group.factors entries must be positive integers");
        factors.push_back(f.get<std::uint32_t>());
    }
    GroupSpec g(std::move(factors));
    if (!doc.contains("A") || !doc.contains("S")) throw ParseError("instance: missing A or S");
    GroupSet A = detail::parse_set(g, doc["A"], "A");
    GroupSet S = detail::parse_set(g, doc["S"], "S");
    return Instance{std::move(g), std::move(A), std::move(S)};
}

inline nlohmann::json set_to_json(const GroupSpec& g, const GroupSet& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (Idx x : s.members()) arr.push_back(g.residues(x));
    return arr;
}

inline std::string serialize_instance(const Instance& inst) {
    nlohmann::ordered_json doc;
    doc["group"]["factors"] = inst.group.factors();
    doc["A"] = set_to_json(inst.group, inst.A);
    doc["S"] = set_to_json(inst.group, inst.S);
    return doc.dump();
}

}  // namespace addcomb
