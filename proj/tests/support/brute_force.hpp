#pragma once

// Reference deducibility check, written directly from the knows/know rules
// at expression level with no item/sequence split and no worklist. It
// enumerates a finite universe (every contiguous piece of every term and
// subterm in sight, plus inverse keys) and applies all rules to every
// universe member until nothing changes.

#include <set>
#include <vector>

#include "streamsec/term.hpp"

namespace streamsec::testing {

class BruteForce {
 public:
  BruteForce(const std::set<Expression>& kb, const std::vector<Expression>& targets) : seeds_(kb) {
    universe_.insert(Expression{});
    for (const auto& e : kb) add_pieces(e);
    for (const auto& e : targets) add_pieces(e);
    saturate();
  }

  bool knows(const Expression& e) const { return known_.count(e) != 0; }
  const std::set<Expression>& universe() const { return universe_; }

 private:
  void add_pieces(const Expression& e) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (std::size_t j = i + 1; j <= e.size(); ++j) {
        universe_.insert(slice(e, i, j));
      }
      const Item& it = e[i];
      if (it.atom().is_key()) universe_.insert(Expression{key_inverse(it.atom())});
      universe_.insert(Expression{it.atom()});
      if (!it.is_atomic()) add_pieces(it.payload());
    }
  }

  static Expression slice(const Expression& e, std::size_t from, std::size_t to) {
    return Expression(std::vector<Item>(e.begin() + from, e.begin() + to));
  }

  bool atom_known(const Atom& a) const { return known_.count(Expression{a}) != 0; }
  // Var keys have no inverse and open nothing.
  bool inverse_known(const Atom& k) const { return k.is_key() && atom_known(key_inverse(k)); }

  bool derivable_now(const Expression& e) const {
    if (e.empty() || seeds_.count(e) != 0) return true;
    // m2 = m ++ m1 or m2 = m1 ++ m with m2 known.
    for (const auto& m2 : known_) {
      if (m2.size() <= e.size()) continue;
      if (std::equal(e.begin(), e.end(), m2.begin())) return true;
      if (std::equal(e.begin(), e.end(), m2.end() - static_cast<std::ptrdiff_t>(e.size()))) return true;
    }
    // m = m1 ++ m2 with both known.
    for (std::size_t k = 1; k < e.size(); ++k) {
      if (knows(slice(e, 0, k)) && knows(slice(e, k, e.size()))) return true;
    }
    if (e.size() == 1 && !e[0].is_atomic()) {
      // Construction: know the key and the payload.
      if (atom_known(e[0].atom()) && knows(e[0].payload())) return true;
    }
    // Opening: some known <Enc(k, e)> with k^-1 known, or <Sign(k', e)> with
    // the verification key known.
    for (const auto& m : known_) {
      if (m.size() != 1 || m[0].is_atomic()) continue;
      if (m[0].payload() == e && inverse_known(m[0].atom())) return true;
    }
    return false;
  }

  void saturate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& e : universe_) {
        if (known_.count(e) == 0 && derivable_now(e)) {
          known_.insert(e);
          changed = true;
        }
      }
    }
  }

  std::set<Expression> seeds_;
  std::set<Expression> universe_;
  std::set<Expression> known_;
};

}  // namespace streamsec::testing
