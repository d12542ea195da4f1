#include "crystality/value.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace crystality {

std::string_view to_string(TypeName t) {
  switch (t) {
    case TypeName::UInt256: return "uint256";
    case TypeName::Bool: return "bool";
    case TypeName::Address: return "address";
  }
  return "?";
}

std::optional<TypeName> type_from_string(std::string_view s) {
  if (s == "uint256") return TypeName::UInt256;
  if (s == "bool") return TypeName::Bool;
  if (s == "address") return TypeName::Address;
  return std::nullopt;
}

TypedValue init(TypeName t) {
  switch (t) {
    case TypeName::UInt256: return TypedValue(UInt256(0));
    case TypeName::Bool: return TypedValue(false);
    case TypeName::Address: return TypedValue(Address{});
  }
  throw std::logic_error("init: unknown type");
}

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

std::uint64_t get_u64(std::span<const std::uint8_t> bytes) {
  std::uint64_t v = 0;
  for (auto b : bytes.first(8)) v = (v << 8) | b;
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode(const TypedValue& v) {
  std::vector<std::uint8_t> out;
  out.reserve(size(v.type()));
  switch (v.type()) {
    case TypeName::UInt256: {
      std::vector<std::uint8_t> digits;
      boost::multiprecision::export_bits(v.as_uint(), std::back_inserter(digits), 8);
      // export_bits drops leading zero bytes
      out.assign(32 - digits.size(), 0);
      out.insert(out.end(), digits.begin(), digits.end());
      break;
    }
    case TypeName::Bool:
      out.push_back(v.as_bool() ? 1 : 0);
      break;
    case TypeName::Address:
      put_u64(out, v.as_address().engine);
      put_u64(out, v.as_address().index);
      break;
  }
  return out;
}

TypedValue decode(TypeName t, std::span<const std::uint8_t> bytes) {
  if (bytes.size() != size(t)) throw std::invalid_argument("decode: width mismatch");
  switch (t) {
    case TypeName::UInt256: {
      UInt256 v;
      boost::multiprecision::import_bits(v, bytes.begin(), bytes.end(), 8);
      return TypedValue(v);
    }
    case TypeName::Bool:
      return TypedValue(bytes[0] != 0);
    case TypeName::Address:
      return TypedValue(Address{get_u64(bytes.first(8)), get_u64(bytes.subspan(8))});
  }
  throw std::logic_error("decode: unknown type");
}

std::string to_string(const TypedValue& v) {
  switch (v.type()) {
    case TypeName::UInt256: return v.as_uint().str();
    case TypeName::Bool: return v.as_bool() ? "true" : "false";
    case TypeName::Address:
      return "address(" + std::to_string(v.as_address().engine) + "," +
             std::to_string(v.as_address().index) + ")";
  }
  return "?";
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

const UInt256& uint256_max() {
  static const UInt256 kMax = ~UInt256(0);
  return kMax;
}

std::optional<UInt256> parse_uint256(std::string_view digits) {
  if (digits.empty() || digits.size() > 78) return std::nullopt;
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  boost::multiprecision::cpp_int wide{std::string(digits)};
  if (wide > boost::multiprecision::cpp_int(uint256_max())) return std::nullopt;
  return UInt256(wide);
}

}  // namespace crystality
