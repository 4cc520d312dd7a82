#pragma once

/// \file cut.hpp
/// \brief Value types shared by the min-cut algorithms and their oracle.

#include "ptree/tree.hpp"

#include <span>
#include <string>
#include <vector>

namespace ptree {

struct MinCut {
    std::vector<NodeId> true_set;   ///< Sorted ascending.
    std::vector<NodeId> false_set;  ///< Sorted ascending.

    friend bool operator==(const MinCut&, const MinCut&) = default;
};

struct CriticalSet {
    std::vector<NodeId> nodes;  ///< Sorted ascending.

    friend bool operator==(const CriticalSet&, const CriticalSet&) = default;
};

/// Counts node visits of the recursive algorithms. Optional everywhere.
struct TraversalStats {
    std::size_t visits = 0;
};

inline std::string format_ids(std::span<const NodeId> ids) {
    std::string out = "[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(ids[i]);
    }
    return out + "]";
}

}  // namespace ptree
