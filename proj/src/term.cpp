#include "streamsec/term.hpp"

#include <algorithm>

namespace streamsec {

std::string_view to_string(AtomKind kind) {
  switch (kind) {
    case AtomKind::Data: return "Data";
    case AtomKind::Key: return "Key";
    case AtomKind::Secret: return "Secret";
    case AtomKind::Var: return "Var";
  }
  return "?";
}

std::string_view to_string(CryptoError error) {
  switch (error) {
    case CryptoError::NotAnEncryption: return "NotAnEncryption";
    case CryptoError::NotASignature: return "NotASignature";
    case CryptoError::WrongKey: return "WrongKey";
    case CryptoError::OutOfRange: return "OutOfRange";
  }
  return "?";
}

Atom::Atom(AtomKind kind, std::string label, std::string inverse_label)
    : kind_(kind), label_(std::move(label)), inverse_label_(std::move(inverse_label)) {
  if (label_.empty()) throw std::invalid_argument("atom label must not be empty");
}

Atom Atom::data(std::string label) { return {AtomKind::Data, std::move(label), {}}; }
Atom Atom::secret(std::string label) { return {AtomKind::Secret, std::move(label), {}}; }
Atom Atom::var(std::string label) { return {AtomKind::Var, std::move(label), {}}; }

Atom Atom::key(std::string label, std::string inverse_label) {
  if (inverse_label.empty()) throw std::invalid_argument("key '" + label + "' needs an inverse label");
  return {AtomKind::Key, std::move(label), std::move(inverse_label)};
}

Atom Atom::symmetric_key(std::string label) {
  auto inverse = label;
  return {AtomKind::Key, std::move(label), std::move(inverse)};
}

Atom key_inverse(const Atom& key) {
  if (!key.is_key()) throw std::invalid_argument("'" + key.label() + "' is not a key");
  return Atom::key(key.inverse_label(), key.label());
}

std::pair<Atom, Atom> key_pair(const std::string& label) {
  auto k = Atom::key(label, label + "^-1");
  return {k, key_inverse(k)};
}

// ---------------------------------------------------------------------------

Expression::Expression(std::initializer_list<Item> items) : items_(items) {}
Expression::Expression(std::vector<Item> items) : items_(std::move(items)) {}

const Item& Expression::operator[](std::size_t i) const { return items_.at(i); }

bool operator==(const Expression& a, const Expression& b) { return a.items_ == b.items_; }

std::strong_ordering operator<=>(const Expression& a, const Expression& b) {
  return std::lexicographical_compare_three_way(a.items_.begin(), a.items_.end(), b.items_.begin(),
                                                b.items_.end());
}

Item::Item(Atom atom) : kind_(Kind::Atomic), atom_(std::move(atom)) {}

Item::Item(Kind kind, Atom atom, Expression payload)
    : kind_(kind), atom_(std::move(atom)), payload_(std::make_shared<const Expression>(std::move(payload))) {}

Item Item::encrypted(Atom key, Expression payload) {
  if (!key.is_encryptor()) throw std::invalid_argument("'" + key.label() + "' cannot encrypt");
  return {Kind::Encrypted, std::move(key), std::move(payload)};
}

Item Item::signed_by(Atom key, Expression payload) {
  if (!key.is_encryptor()) throw std::invalid_argument("'" + key.label() + "' cannot sign");
  return {Kind::Signed, std::move(key), std::move(payload)};
}

const Expression& Item::payload() const {
  static const Expression kEmpty;
  return payload_ ? *payload_ : kEmpty;
}

std::size_t Item::depth() const {
  if (is_atomic()) return 0;
  std::size_t inner = 0;
  for (const auto& item : *payload_) inner = std::max(inner, item.depth());
  return inner + 1;
}

bool operator==(const Item& a, const Item& b) {
  if (a.kind_ != b.kind_ || a.atom_ != b.atom_) return false;
  if (a.is_atomic()) return true;
  return a.payload_ == b.payload_ || *a.payload_ == *b.payload_;
}

std::strong_ordering operator<=>(const Item& a, const Item& b) {
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  if (auto c = a.atom_ <=> b.atom_; c != 0) return c;
  if (a.is_atomic() || a.payload_ == b.payload_) return std::strong_ordering::equal;
  return *a.payload_ <=> *b.payload_;
}

// ---------------------------------------------------------------------------

Expression enc(const Atom& key, Expression e) { return {Item::encrypted(key, std::move(e))}; }

Expression sign(const Atom& key, Expression e) { return {Item::signed_by(key, std::move(e))}; }

namespace {

// Shared destructor: `key` must be the inverse of the constructor's key.
// Variables have no inverse and never match.
CryptoResult<Expression> open(Item::Kind kind, CryptoError shape_error, const Atom& key,
                              const Expression& e) {
  if (e.size() != 1 || e[0].kind() != kind) return shape_error;
  const Atom& used = e[0].atom();
  if (!used.is_key() || !key.is_key() || key_inverse(used) != key) return CryptoError::WrongKey;
  return e[0].payload();
}

}  // namespace

CryptoResult<Expression> decr(const Atom& key, const Expression& e) {
  return open(Item::Kind::Encrypted, CryptoError::NotAnEncryption, key, e);
}

CryptoResult<Expression> ext(const Atom& key, const Expression& e) {
  return open(Item::Kind::Signed, CryptoError::NotASignature, key, e);
}

Expression concat(const Expression& a, const Expression& b) {
  std::vector<Item> items(a.begin(), a.end());
  items.insert(items.end(), b.begin(), b.end());
  return Expression(std::move(items));
}

CryptoResult<Item> element(const Expression& e, Position position) {
  auto index = static_cast<std::size_t>(position);
  if (index == 0 || index > e.size()) return CryptoError::OutOfRange;
  return e[index - 1];
}

// ---------------------------------------------------------------------------

std::string render(const Atom& atom) { return atom.label(); }

std::string render(const Item& item) {
  switch (item.kind()) {
    case Item::Kind::Atomic: return item.atom().label();
    case Item::Kind::Encrypted: return "enc(" + item.atom().label() + ", " + render(item.payload()) + ")";
    case Item::Kind::Signed: return "sig(" + item.atom().label() + ", " + render(item.payload()) + ")";
  }
  return "?";
}

std::string render(const Expression& e) {
  std::string out = "<";
  bool first = true;
  for (const auto& item : e) {
    if (!first) out += ", ";
    out += render(item);
    first = false;
  }
  return out + ">";
}

// ---------------------------------------------------------------------------

const Atom& AtomTable::add(Atom atom) {
  auto [it, inserted] = atoms_.try_emplace(atom.label(), atom);
  if (!inserted && it->second != atom) {
    throw std::invalid_argument("atom label '" + atom.label() + "' already registered with a different kind");
  }
  return it->second;
}

const Atom& AtomTable::add_key_pair(const std::string& label, const std::string& inverse_label) {
  if (label == inverse_label) throw std::invalid_argument("asymmetric key '" + label + "' equals its inverse");
  auto k = Atom::key(label, inverse_label);
  add(streamsec::key_inverse(k));
  return add(std::move(k));
}

const Atom& AtomTable::add_symmetric_key(const std::string& label) { return add(Atom::symmetric_key(label)); }

bool AtomTable::contains(std::string_view label) const { return atoms_.find(label) != atoms_.end(); }

const Atom& AtomTable::at(std::string_view label) const {
  auto it = atoms_.find(label);
  if (it == atoms_.end()) throw LookupError("unknown atom '" + std::string(label) + "'");
  return it->second;
}

Atom AtomTable::key_inverse(std::string_view label) const {
  const Atom& k = at(label);
  if (!k.is_key()) throw LookupError("'" + std::string(label) + "' is not a key");
  return at(k.inverse_label());
}

std::vector<Atom> AtomTable::atoms() const {
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (const auto& [_, atom] : atoms_) out.push_back(atom);
  return out;
}

}  // namespace streamsec
