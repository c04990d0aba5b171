#pragma once

// Adversary knowledge and Dolev-Yao deducibility.
//
// Deciding whether an expression is derivable runs in two phases:
//
//  1. Analysis saturates the known expressions under decomposition: every
//     item of a known sequence is known on its own, an encrypted item opens
//     when the inverse of its key is known, and a signed item yields its
//     payload when the verification key is known. Each rule only adds
//     subterms of existing terms, so saturation terminates.
//
//  2. Synthesis checks the target structurally: the empty expression is
//     always known, a sequence is known when each of its items is, and an
//     encrypted or signed item can be built when its key and payload are.
//
// Observations are time-stamped so that knowledge "at time t" can be
// queried by restricting to observations made no later than t.

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "streamsec/term.hpp"
#include "streamsec/timed_stream.hpp"

namespace streamsec {

class DomainError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  /// `initial` holds local secrets and a priori knowledge. `own` is the
  /// holder's own key/secret set, which know_item refuses to be asked about.
  explicit KnowledgeBase(std::set<Expression> initial, std::set<Atom> own = {});

  KnowledgeBase observe(Time t, Expression e) const;
  /// Same knowledge with the analysis closure computed and cached.
  KnowledgeBase analyze() const;
  /// Knowledge restricted to observations made at or before `t`.
  KnowledgeBase until(Time t) const;

  bool derivable(const Expression& target) const;
  /// Throws DomainError when `m` is not a key/secret or belongs to the holder.
  bool know_item(const Atom& m) const;

  /// Saturated expression set (includes initial and observed expressions).
  std::set<Expression> analyzed() const;
  bool is_analyzed() const { return closure_ != nullptr; }

  /// Sorted canonical renderings of the analyzed set.
  std::vector<std::string> dump() const;

  const std::set<Expression>& initial() const { return initial_; }
  const std::vector<std::pair<Time, Expression>>& observed() const { return observed_; }
  const std::set<Atom>& own() const { return own_; }

 private:
  struct Closure;
  std::shared_ptr<const Closure> closure() const;

  std::set<Expression> initial_;
  std::vector<std::pair<Time, Expression>> observed_;
  std::set<Atom> own_;
  std::shared_ptr<const Closure> closure_;
};

struct SecrecyTarget {
  Atom item;
  /// Components whose key/secret sets must not contain `item`.
  std::set<std::string> owner_exclusion;
};

struct Leak {
  Atom item;
  Time time;

  friend bool operator==(const Leak&, const Leak&) = default;
};

/// Earliest time unit t' <= t at which each target became derivable.
/// Targets that never leak are absent from the result.
std::vector<Leak> leak_check(const KnowledgeBase& kb, const std::vector<SecrecyTarget>& targets, Time t);

}  // namespace streamsec
