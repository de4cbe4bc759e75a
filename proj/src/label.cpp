#include "polarq/label.hpp"

#include <sstream>

namespace polarq {

int OutputLabel::depth() const {
    if (is_atom()) return 0;
    int d = 0;
    for (const auto& p : parts) d = std::max(d, p.depth());
    return d + 1;
}

OutputLabel OutputLabel::tuple(std::vector<OutputLabel> elems, int tag) {
    OutputLabel l;
    l.parts = std::move(elems);
    l.tag = tag;
    return l;
}

int compare(const OutputLabel& a, const OutputLabel& b) {
    if (a.parts.size() != b.parts.size())
        return a.parts.size() < b.parts.size() ? -1 : 1;
    if (a.is_atom()) {
        if (a.atom != b.atom) return a.atom < b.atom ? -1 : 1;
    } else {
        for (std::size_t i = 0; i < a.parts.size(); ++i)
            if (int c = compare(a.parts[i], b.parts[i]); c != 0) return c;
    }
    if (a.tag != b.tag) return a.tag < b.tag ? -1 : 1;
    return 0;
}

std::string OutputLabel::str() const {
    std::ostringstream os;
    if (is_atom()) {
        os << atom;
    } else {
        os << '(';
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) os << ',';
            os << parts[i].str();
        }
        os << ')';
    }
    if (tag >= 0) os << '#' << tag;
    return os.str();
}

} // namespace polarq
