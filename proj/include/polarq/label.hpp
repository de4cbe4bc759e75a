#pragma once

#include <string>
#include <vector>

namespace polarq {

// Structured output symbol: an atomic index, or a tuple of labels built up by
// successive channel transforms, optionally tagged with the index of the
// randomization component (permutation id or multiplier) it was produced under.
struct OutputLabel {
    int atom = 0;
    int tag = -1; // -1 when untagged
    std::vector<OutputLabel> parts; // empty => atomic

    OutputLabel() = default;
    explicit OutputLabel(int a) : atom(a) {}

    bool is_atom() const { return parts.empty(); }
    int depth() const;

    static OutputLabel tuple(std::vector<OutputLabel> elems, int tag = -1);

    std::string str() const;
};

int compare(const OutputLabel& a, const OutputLabel& b);

inline bool operator==(const OutputLabel& a, const OutputLabel& b) { return compare(a, b) == 0; }
inline bool operator!=(const OutputLabel& a, const OutputLabel& b) { return compare(a, b) != 0; }
inline bool operator<(const OutputLabel& a, const OutputLabel& b) { return compare(a, b) < 0; }

} // namespace polarq
