#pragma once

#include <vector>

#include "ipof/dataset.hpp"

namespace fixtures {

// Seven points A..G (indices 0..6) with k = 2: F (index 5) sits far above
// the others, its two nearest neighbors are B and D, and no point lists F.
enum Node { A, B, C, D, E, F, G };

inline ipof::Dataset common_neighbor_toy() {
    return ipof::Dataset({-1, -1, 0, 0, 1, -1.5, 2, 0, 3, -1, 1, 5, 4, -1}, 2,
                         std::vector<ipof::Label>{0, 0, 0, 0, 0, 1, 0}, "toy");
}

// 1-D points [0, 1, 3].
inline ipof::Dataset line3() { return ipof::Dataset({0.0, 1.0, 3.0}, 1); }

}  // namespace fixtures
