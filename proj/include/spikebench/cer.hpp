#pragma once

// Classification error rate: CER = 1 - CA_CC, where CA_CC is the fraction of
// correctly assigned vectors under the best cluster-to-truth label
// permutation. Exhaustive permutation matching, exact for z <= 6.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spikebench {

inline double classification_error(std::span<const int> assignment, std::span<const int> truth) {
    if (assignment.size() != truth.size()) {
        throw std::invalid_argument("classification_error: length mismatch");
    }
    if (assignment.empty()) throw std::invalid_argument("classification_error: empty input");
    int max_label = 0;
    for (int v : assignment) {
        if (v < 0) throw std::invalid_argument("classification_error: negative label");
        max_label = std::max(max_label, v);
    }
    for (int v : truth) {
        if (v < 0) throw std::invalid_argument("classification_error: negative label");
        max_label = std::max(max_label, v);
    }
    const int z = max_label + 1;
    if (z > 6) throw std::invalid_argument("classification_error: more than 6 labels");

    std::vector<int> perm(static_cast<std::size_t>(z));
    for (int i = 0; i < z; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::size_t best = 0;
    do {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            if (perm[static_cast<std::size_t>(assignment[i])] == truth[i]) ++correct;
        }
        best = std::max(best, correct);
    } while (std::next_permutation(perm.begin(), perm.end()));

    return 1.0 - static_cast<double>(best) / static_cast<double>(assignment.size());
}

}  // namespace spikebench
