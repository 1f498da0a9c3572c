#include "abl/type_store.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace abl {

TypeStore::TypeStore() { fresh(); }

TypeStore TypeStore::with_issued(std::size_t count) {
    TypeStore store;
    while (store.issued_count() < count) store.fresh();
    return store;
}

NonTerminal TypeStore::fresh() {
    const auto id = static_cast<NonTerminal>(parent_.size());
    parent_.push_back(id);
    ++classes_;
    return id;
}

NonTerminal TypeStore::canonical(NonTerminal t) const {
    if (!issued(t)) throw std::invalid_argument("unknown non-terminal " + std::to_string(t));
    NonTerminal root = t;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[t] != root) t = std::exchange(parent_[t], root);
    return root;
}

NonTerminal TypeStore::merge(NonTerminal a, NonTerminal b) {
    NonTerminal ra = canonical(a), rb = canonical(b);
    if (ra == rb) return ra;
    if (rb < ra) std::swap(ra, rb);
    parent_[rb] = ra;
    --classes_;
    return ra;
}

} // namespace abl
