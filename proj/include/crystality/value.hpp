#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace crystality {

// 256-bit unsigned integer; the builtin operators below add overflow checks on top.
using UInt256 = boost::multiprecision::uint256_t;

enum class TypeName : std::uint8_t { UInt256 = 0, Bool = 1, Address = 2 };

std::string_view to_string(TypeName t);
std::optional<TypeName> type_from_string(std::string_view s);

// An on-chain address: the j-th address slot of the r-th engine, both 1-based.
// (0,0) is the invalid sentinel produced by init(address).
struct Address {
  std::uint64_t engine = 0;
  std::uint64_t index = 0;

  friend auto operator<=>(const Address&, const Address&) = default;
};

class TypedValue {
 public:
  TypedValue() = default;
  TypedValue(UInt256 v) : data_(std::move(v)) {}
  TypedValue(bool v) : data_(v) {}
  TypedValue(Address v) : data_(v) {}

  static TypedValue uint(std::uint64_t v) { return TypedValue(UInt256(v)); }

  TypeName type() const { return static_cast<TypeName>(data_.index()); }

  bool is(TypeName t) const { return type() == t; }

  const UInt256& as_uint() const { return std::get<UInt256>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const Address& as_address() const { return std::get<Address>(data_); }

  friend bool operator==(const TypedValue&, const TypedValue&) = default;

 private:
  std::variant<UInt256, bool, Address> data_{UInt256(0)};
};

/// Byte width of a value of type `t` in a store.
constexpr std::size_t size(TypeName t) {
  switch (t) {
    case TypeName::UInt256: return 32;
    case TypeName::Bool: return 1;
    case TypeName::Address: return 16;
  }
  return 0;
}

/// Initial value for a freshly declared variable.
TypedValue init(TypeName t);

/// Fixed-width big-endian encoding; the output has exactly size(v.type()) bytes.
std::vector<std::uint8_t> encode(const TypedValue& v);

/// Inverse of encode(). `bytes.size()` must equal size(t).
TypedValue decode(TypeName t, std::span<const std::uint8_t> bytes);

/// Source-literal rendering: `42`, `true`, `address(2,3)`.
std::string to_string(const TypedValue& v);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Largest representable UInt256 (2^256 - 1).
const UInt256& uint256_max();

/// Parses a decimal literal; nullopt when malformed or out of range.
std::optional<UInt256> parse_uint256(std::string_view digits);

}  // namespace crystality
