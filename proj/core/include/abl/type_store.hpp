#pragma once

#include <cstdint>
#include <vector>

namespace abl {

using NonTerminal = std::uint32_t;

// Reserved type shared by every sentence-level hypothesis.
inline constexpr NonTerminal kSentenceType = 0;

// Union-find over issued non-terminal ids. The canonical id of a class is
// its smallest member, so the reserved sentence type stays 0 and the
// representative never depends on merge order.
class TypeStore {
public:
    // Starts with the reserved sentence type already issued.
    TypeStore();

    // Issues a store whose ids 0..count-1 are issued and all distinct.
    static TypeStore with_issued(std::size_t count);

    NonTerminal fresh();
    NonTerminal canonical(NonTerminal t) const;
    // Returns the canonical id of the merged class. Throws
    // std::invalid_argument for ids this store never issued.
    NonTerminal merge(NonTerminal a, NonTerminal b);

    bool issued(NonTerminal t) const { return t < parent_.size(); }
    std::size_t issued_count() const { return parent_.size(); }
    std::size_t class_count() const { return classes_; }

private:
    mutable std::vector<NonTerminal> parent_;
    std::size_t classes_ = 0;
};

} // namespace abl
