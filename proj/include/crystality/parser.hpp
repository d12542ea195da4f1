#pragma once

#include "crystality/syntax.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crystality {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, std::vector<std::string> expected, std::string found);

  int line() const { return line_; }
  int column() const { return column_; }
  /// Sorted, de-duplicated set of token spellings that would have been accepted.
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
  std::string found_;
};

struct ParseLimits {
  std::size_t max_source_bytes = std::size_t{1} << 20;
  int max_nesting = 200;
};

/// Parses one contract. `//` comments run to end of line. Blocks are folded into
/// right-nested Seq nodes; an empty block is Skip.
ContractDecl parse_contract(std::string_view source, const ParseLimits& limits = {});

/// Parses a single expression (used by tests and tooling).
Exp parse_expression(std::string_view source, const ParseLimits& limits = {});

/// Reserved words; none of them can be used as an identifier.
bool is_keyword(std::string_view word);

}  // namespace crystality
