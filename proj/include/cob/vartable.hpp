#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cob::poly {

// Ordered table of variable names; the declaration order fixes the monomial
// order and the coordinate layout everywhere downstream.
class VarTable {
public:
    VarTable() = default;
    explicit VarTable(std::vector<std::string> names) {
        for (auto& n : names) add(n);
    }

    std::size_t add(const std::string& name) {
        if (index_.count(name))
            throw std::invalid_argument("duplicate variable: " + name);
        index_[name] = names_.size();
        names_.push_back(name);
        return names_.size() - 1;
    }

    std::optional<std::size_t> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(std::size_t i) const { return names_.at(i); }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    friend bool operator==(const VarTable& a, const VarTable& b) {
        return a.names_ == b.names_;
    }

private:
    std::vector<std::string> names_;
    std::map<std::string, std::size_t> index_;
};

// Abstract-variable table w1..wm.
inline VarTable abstract_vars(std::size_t m) {
    VarTable vt;
    for (std::size_t i = 1; i <= m; ++i) vt.add("w" + std::to_string(i));
    return vt;
}

}  // namespace cob::poly
