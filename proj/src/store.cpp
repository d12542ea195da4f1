#include "crystality/store.hpp"

#include <algorithm>
#include <sstream>

namespace crystality {

std::optional<std::uint64_t> ByteStore::address_of(const std::string& id) const {
  auto it = slots_.find(id);
  if (it == slots_.end()) return std::nullopt;
  return it->second.offset;
}

std::optional<TypeName> ByteStore::type_of(const std::string& id) const {
  auto it = slots_.find(id);
  if (it == slots_.end()) return std::nullopt;
  return it->second.type;
}

void ByteStore::allocate_new(TypeName t, const std::string& id) {
  if (slots_.contains(id)) {
    throw StoreError(StoreError::Kind::AlreadyDefined, id, "'" + id + "' is already defined");
  }
  slots_.emplace(id, Slot{next_free_, t});
  next_free_ += size(t);
}

std::vector<std::uint8_t> ByteStore::read_bytes(std::uint64_t offset, std::size_t count) const {
  std::vector<std::uint8_t> out(count, 0);
  auto it = bytes_.lower_bound(offset);
  for (; it != bytes_.end() && it->first < offset + count; ++it) {
    out[it->first - offset] = it->second;
  }
  return out;
}

TypedValue ByteStore::read(const std::string& id) const {
  auto it = slots_.find(id);
  if (it == slots_.end()) {
    throw StoreError(StoreError::Kind::Undefined, id, "'" + id + "' is not defined");
  }
  const Slot& slot = it->second;
  return decode(slot.type, read_bytes(slot.offset, size(slot.type)));
}

void ByteStore::write(const std::string& id, const TypedValue& v) {
  auto it = slots_.find(id);
  if (it == slots_.end()) {
    throw StoreError(StoreError::Kind::Undefined, id, "'" + id + "' is not defined");
  }
  const Slot& slot = it->second;
  if (slot.type != v.type()) {
    throw StoreError(StoreError::Kind::TypeMismatch, id,
                     "cannot store " + std::string(to_string(v.type())) + " into '" + id +
                         "' of type " + std::string(to_string(slot.type)));
  }
  auto encoded = encode(v);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == 0) {
      bytes_.erase(slot.offset + i);
    } else {
      bytes_[slot.offset + i] = encoded[i];
    }
  }
}

std::string ByteStore::dump() const {
  std::vector<std::pair<std::string, Slot>> ordered(slots_.begin(), slots_.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.second.offset < b.second.offset; });
  std::ostringstream os;
  for (const auto& [name, slot] : ordered) {
    os << name << " : " << to_string(slot.type) << " @ " << slot.offset << " = "
       << to_hex(read_bytes(slot.offset, size(slot.type))) << "\n";
  }
  return os.str();
}

}  // namespace crystality
