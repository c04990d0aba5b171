#include "streamsec/knowledge.hpp"

#include <algorithm>

namespace streamsec {

struct KnowledgeBase::Closure {
  std::set<Expression> expressions;
  // Every item of every analyzed expression; singleton closure.
  std::set<Item> items;
};

namespace {

bool is_known_key(const std::set<Item>& items, const Atom& key) { return items.count(Item(key)) != 0; }

bool synthesize(const std::set<Item>& items, const Expression& target);

bool synthesize(const std::set<Item>& items, const Item& target) {
  if (items.count(target) != 0) return true;
  if (target.is_atomic()) return false;
  return is_known_key(items, target.atom()) && synthesize(items, target.payload());
}

bool synthesize(const std::set<Item>& items, const Expression& target) {
  return std::all_of(target.begin(), target.end(), [&](const Item& i) { return synthesize(items, i); });
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::set<Expression> initial, std::set<Atom> own)
    : initial_(std::move(initial)), own_(std::move(own)) {}

KnowledgeBase KnowledgeBase::observe(Time t, Expression e) const {
  KnowledgeBase next = *this;
  next.observed_.emplace_back(t, std::move(e));
  next.closure_.reset();
  return next;
}

KnowledgeBase KnowledgeBase::until(Time t) const {
  KnowledgeBase next = *this;
  std::erase_if(next.observed_, [t](const auto& obs) { return obs.first > t; });
  next.closure_.reset();
  return next;
}

KnowledgeBase KnowledgeBase::analyze() const {
  KnowledgeBase next = *this;
  next.closure_ = closure();
  return next;
}

std::shared_ptr<const KnowledgeBase::Closure> KnowledgeBase::closure() const {
  if (closure_) return closure_;

  auto c = std::make_shared<Closure>();
  std::vector<Expression> work(initial_.begin(), initial_.end());
  for (const auto& [_, e] : observed_) work.push_back(e);
  // Encrypted and signed items whose opening key is not (yet) known.
  std::vector<Item> locked;

  for (;;) {
    while (!work.empty()) {
      Expression e = std::move(work.back());
      work.pop_back();
      // <> is derivable by definition and carries nothing to analyze.
      if (e.empty() || !c->expressions.insert(e).second) continue;
      if (e.size() == 1) {
        if (c->items.insert(e[0]).second && !e[0].is_atomic()) locked.push_back(e[0]);
        continue;
      }
      for (const auto& item : e) work.push_back(Expression{item});
    }

    // Decryption needs the inverse of the encryption key; signature
    // extraction needs the inverse of the signing key (the public key).
    auto opened = std::stable_partition(locked.begin(), locked.end(), [&](const Item& item) {
      const Atom& k = item.atom();
      return !(k.is_key() && is_known_key(c->items, key_inverse(k)));
    });
    if (opened == locked.end()) break;
    for (auto it = opened; it != locked.end(); ++it) work.push_back(it->payload());
    locked.erase(opened, locked.end());
  }
  return c;
}

bool KnowledgeBase::derivable(const Expression& target) const {
  if (target.empty()) return true;
  return synthesize(closure()->items, target);
}

bool KnowledgeBase::know_item(const Atom& m) const {
  if (m.kind() != AtomKind::Key && m.kind() != AtomKind::Secret) {
    throw DomainError("know_item: '" + m.label() + "' is not a key or secret");
  }
  if (own_.count(m) != 0) {
    throw DomainError("know_item: '" + m.label() + "' belongs to the holder's own key/secret set");
  }
  return derivable(Expression{m});
}

std::set<Expression> KnowledgeBase::analyzed() const { return closure()->expressions; }

std::vector<std::string> KnowledgeBase::dump() const {
  std::vector<std::string> lines;
  for (const auto& e : closure()->expressions) lines.push_back(render(e));
  std::sort(lines.begin(), lines.end());
  return lines;
}

std::vector<Leak> leak_check(const KnowledgeBase& kb, const std::vector<SecrecyTarget>& targets, Time t) {
  for (const auto& target : targets) {
    if (target.item.kind() != AtomKind::Key && target.item.kind() != AtomKind::Secret) {
      throw DomainError("secrecy target '" + target.item.label() + "' is not a key or secret");
    }
    if (kb.own().count(target.item) != 0) {
      throw DomainError("secrecy target '" + target.item.label() + "' belongs to the observer");
    }
  }

  std::vector<std::optional<Time>> first(targets.size());
  for (Time now = 0;; ++now) {
    auto snapshot = kb.until(now).analyze();
    bool pending = false;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (first[i]) continue;
      if (snapshot.derivable(Expression{targets[i].item})) {
        first[i] = now;
      } else {
        pending = true;
      }
    }
    if (!pending || now == t) break;
  }

  std::vector<Leak> leaks;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (first[i]) leaks.push_back({targets[i].item, *first[i]});
  }
  return leaks;
}

}  // namespace streamsec
