#pragma once

#include "crystality/value.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crystality {

class StoreError : public std::runtime_error {
 public:
  enum class Kind { AlreadyDefined, Undefined, TypeMismatch };

  StoreError(Kind kind, std::string id, const std::string& what)
      : std::runtime_error(what), kind_(kind), id_(std::move(id)) {}

  Kind kind() const { return kind_; }
  const std::string& id() const { return id_; }

 private:
  Kind kind_;
  std::string id_;
};

// Byte-addressed storage with an attached name space and type space.
//
// Backs every store in a configuration: per-address storage, per-engine storage,
// the global store and each memory-stack layer. Allocation is a monotone bump
// allocator from offset 0; nothing is ever freed. Bytes are kept sparsely with
// zero bytes elided, so two stores holding the same values compare equal no
// matter how those values got there.
class ByteStore {
 public:
  struct Slot {
    std::uint64_t offset = 0;
    TypeName type = TypeName::UInt256;

    friend bool operator==(const Slot&, const Slot&) = default;
  };

  /// N_f(id)
  std::optional<std::uint64_t> address_of(const std::string& id) const;
  /// T_f(id)
  std::optional<TypeName> type_of(const std::string& id) const;

  bool defined(const std::string& id) const { return slots_.contains(id); }

  /// Reserves size(t) bytes at next_free for `id`. Bytes are left untouched.
  /// Throws StoreError(AlreadyDefined).
  void allocate_new(TypeName t, const std::string& id);

  /// Throws StoreError(Undefined).
  TypedValue read(const std::string& id) const;

  /// Throws StoreError(Undefined) or StoreError(TypeMismatch).
  void write(const std::string& id, const TypedValue& v);

  std::vector<std::uint8_t> read_bytes(std::uint64_t offset, std::size_t count) const;

  std::uint64_t next_free() const { return next_free_; }
  const std::map<std::string, Slot>& slots() const { return slots_; }
  bool empty() const { return slots_.empty(); }

  /// One line per identifier, ordered by offset: `name : type @ offset = hex`.
  std::string dump() const;

  friend bool operator==(const ByteStore&, const ByteStore&) = default;

 private:
  std::map<std::uint64_t, std::uint8_t> bytes_;
  std::map<std::string, Slot> slots_;
  std::uint64_t next_free_ = 0;
};

}  // namespace crystality
