#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cgd/errors.hpp"

namespace cgd {

/// Structured vertex identifier: an alphanumeric base segment plus a path of
/// small integer suffixes. Fresh names are derived by suffixing, so a rule can
/// always mint names that are new yet traceable to their origin.
struct VertexName {
    std::string base;
    std::vector<int> path;

    VertexName() = default;
    explicit VertexName(std::string base, std::vector<int> path = {})
        : base(std::move(base)), path(std::move(path)) {}

    auto operator<=>(const VertexName&) const = default;

    /// Derive the name extended by one suffix segment.
    VertexName child(int k) const {
        VertexName n = *this;
        n.path.push_back(k);
        return n;
    }

    bool has_parent() const { return !path.empty(); }

    VertexName parent() const {
        VertexName n = *this;
        n.path.pop_back();
        return n;
    }

    std::string str() const {
        std::string s = base;
        for (int k : path) s += "." + std::to_string(k);
        return s;
    }

    static std::optional<VertexName> parse(const std::string& text) {
        if (text.empty()) return std::nullopt;
        VertexName n;
        size_t i = 0;
        while (i < text.size() && text[i] != '.') i++;
        n.base = text.substr(0, i);
        if (n.base.empty()) return std::nullopt;
        for (char c : n.base)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
                return std::nullopt;
        while (i < text.size()) {
            i++;  // skip '.'
            size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) j++;
            if (j == i) return std::nullopt;
            n.path.push_back(std::stoi(text.substr(i, j - i)));
            if (j < text.size() && text[j] != '.') return std::nullopt;
            i = j;
        }
        return n;
    }
};

/// Finite-support bijection on names: explicit pairs, identity elsewhere.
class Renaming {
public:
    Renaming() = default;

    void set(const VertexName& from, const VertexName& to) {
        auto [it, fresh] = map_.emplace(from, to);
        if (!fresh && it->second != to)
            throw NonInjectiveRenaming("conflicting images for " + from.str());
        map_[from] = to;
    }

    VertexName operator()(const VertexName& n) const {
        auto it = map_.find(n);
        return it == map_.end() ? n : it->second;
    }

    const std::map<VertexName, VertexName>& pairs() const { return map_; }

    Renaming inverse() const {
        Renaming r;
        for (const auto& [from, to] : map_) r.set(to, from);
        return r;
    }

    /// Check injectivity over a concrete set of names (explicit images must
    /// not collide with each other nor with identity-mapped names in use).
    bool injective_over(const std::set<VertexName>& names) const {
        std::set<VertexName> images;
        for (const auto& n : names)
            if (!images.insert((*this)(n)).second) return false;
        return true;
    }

private:
    std::map<VertexName, VertexName> map_;
};

/// Segmentwise conjugate of a renaming: a name derived by suffixing from some
/// renamed name follows its deepest renamed ancestor. Built explicitly over
/// the given set of names.
inline Renaming conjugate_renaming(const Renaming& r, const std::set<VertexName>& names) {
    Renaming out;
    for (const auto& n : names) {
        VertexName probe = n;
        std::vector<int> stripped;
        for (;;) {
            if (r.pairs().count(probe)) {
                VertexName image = r(probe);
                for (auto it = stripped.rbegin(); it != stripped.rend(); ++it)
                    image = image.child(*it);
                out.set(n, image);
                break;
            }
            if (!probe.has_parent()) break;  // no renamed ancestor: identity
            stripped.push_back(probe.path.back());
            probe = probe.parent();
        }
    }
    return out;
}

}  // namespace cgd
