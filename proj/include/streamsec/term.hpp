#pragma once

// Symbolic message terms in the free Dolev-Yao algebra.
//
// An Expression is a finite sequence of Items. An Item is either an atom
// (data value, key, unguessable secret, or specification variable) or one of
// the two composite constructors produced by encryption and signing. The two
// destructors `decr` and `ext` succeed only with the matching inverse key, so
//
//   decr(inverse(k), enc(k, e)) == e
//   ext(k, sign(inverse(k), e)) == e
//
// hold by construction and nothing else does.

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "streamsec/result.hpp"

namespace streamsec {

enum class AtomKind { Data, Key, Secret, Var };

std::string_view to_string(AtomKind kind);

class Atom {
 public:
  static Atom data(std::string label);
  static Atom secret(std::string label);
  static Atom var(std::string label);
  /// Asymmetric key whose inverse carries `inverse_label`.
  static Atom key(std::string label, std::string inverse_label);
  static Atom symmetric_key(std::string label);

  AtomKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  bool is_key() const { return kind_ == AtomKind::Key; }
  /// Keys and variables may be used as encryptors.
  bool is_encryptor() const { return kind_ == AtomKind::Key || kind_ == AtomKind::Var; }
  bool symmetric() const { return is_key() && inverse_label_ == label_; }
  /// Empty for non-key atoms.
  const std::string& inverse_label() const { return inverse_label_; }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom&, const Atom&) = default;

 private:
  Atom(AtomKind kind, std::string label, std::string inverse_label);

  AtomKind kind_;
  std::string label_;
  std::string inverse_label_;
};

/// Inverse of a key atom. Involutive; identity on symmetric keys.
/// Throws std::invalid_argument for non-key atoms.
Atom key_inverse(const Atom& key);

/// Convenience: (K, K^-1) with the conventional `^-1` suffix.
std::pair<Atom, Atom> key_pair(const std::string& label);

class Item;

class Expression {
 public:
  Expression() = default;
  Expression(std::initializer_list<Item> items);
  explicit Expression(std::vector<Item> items);

  std::span<const Item> items() const;
  std::size_t size() const;
  bool empty() const;
  const Item& operator[](std::size_t i) const;

  const Item* begin() const;
  const Item* end() const;

  friend bool operator==(const Expression& a, const Expression& b);
  friend std::strong_ordering operator<=>(const Expression& a, const Expression& b);

 private:
  std::vector<Item> items_;
};

class Item {
 public:
  enum class Kind { Atomic, Encrypted, Signed };

  Item(Atom atom);  // NOLINT(google-explicit-constructor): atoms are items
  static Item encrypted(Atom key, Expression payload);
  static Item signed_by(Atom key, Expression payload);

  Kind kind() const { return kind_; }
  bool is_atomic() const { return kind_ == Kind::Atomic; }
  /// The atom itself for atomic items; the encryptor/signer otherwise.
  const Atom& atom() const { return atom_; }
  /// Payload of a composite item. Empty for atoms.
  const Expression& payload() const;

  /// Number of crypto constructors on the longest root-to-leaf path.
  std::size_t depth() const;

  friend bool operator==(const Item& a, const Item& b);
  friend std::strong_ordering operator<=>(const Item& a, const Item& b);

 private:
  Item(Kind kind, Atom atom, Expression payload);

  Kind kind_;
  Atom atom_;
  std::shared_ptr<const Expression> payload_;
};

inline std::span<const Item> Expression::items() const { return items_; }
inline std::size_t Expression::size() const { return items_.size(); }
inline bool Expression::empty() const { return items_.empty(); }
inline const Item* Expression::begin() const { return items_.data(); }
inline const Item* Expression::end() const { return items_.data() + items_.size(); }

enum class CryptoError { NotAnEncryption, NotASignature, WrongKey, OutOfRange };

std::string_view to_string(CryptoError error);

template <class T>
using CryptoResult = Result<T, CryptoError>;

/// <EncTerm(key, e)>. Throws std::invalid_argument if key is not an encryptor.
Expression enc(const Atom& key, Expression e);
/// Payload of a single encrypted item whose encryption key is the inverse of `key`.
CryptoResult<Expression> decr(const Atom& key, const Expression& e);
/// <SigTerm(key, e)>. Throws std::invalid_argument if key is not an encryptor.
Expression sign(const Atom& key, Expression e);
/// Verifies with `key` and returns the signed payload.
CryptoResult<Expression> ext(const Atom& key, const Expression& e);

Expression concat(const Expression& a, const Expression& b);

enum class Position : std::size_t { First = 1, Second = 2, Third = 3 };

CryptoResult<Item> element(const Expression& e, Position position);

std::string render(const Atom& atom);
std::string render(const Item& item);
std::string render(const Expression& e);

class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Registry of the atoms used in one scenario. Labels are unique across kinds;
// registering a key pair registers both halves.
class AtomTable {
 public:
  const Atom& add(Atom atom);
  /// Registers K and its inverse; returns K.
  const Atom& add_key_pair(const std::string& label, const std::string& inverse_label);
  const Atom& add_symmetric_key(const std::string& label);

  bool contains(std::string_view label) const;
  const Atom& at(std::string_view label) const;
  Atom key_inverse(std::string_view label) const;

  std::vector<Atom> atoms() const;

 private:
  std::map<std::string, Atom, std::less<>> atoms_;
};

}  // namespace streamsec
