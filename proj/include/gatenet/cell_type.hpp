#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace gatenet {

/// Cell vocabulary. The enum value fixes the one-hot feature index of each
/// type, so the order is part of the on-disk and in-model contract.
enum class CellType : uint8_t {
  Input = 0,
  Output = 1,
  And = 2,
  Or = 3,
  Not = 4,
  Xor = 5,
  Dff = 6,
  DffR = 7,
  DffSr = 8,
};

inline constexpr int kNumCellTypes = 9;

constexpr std::string_view cell_type_name(CellType t) {
  switch (t) {
    case CellType::Input: return "INPUT";
    case CellType::Output: return "OUTPUT";
    case CellType::And: return "AND";
    case CellType::Or: return "OR";
    case CellType::Not: return "NOT";
    case CellType::Xor: return "XOR";
    case CellType::Dff: return "DFF";
    case CellType::DffR: return "DFF_R";
    case CellType::DffSr: return "DFF_SR";
  }
  return "?";
}

std::optional<CellType> cell_type_from_name(std::string_view name);

/// Required number of in-edges. INPUT sources a net; OUTPUT observes one.
/// Flipflops expose only their data pin (clock/reset lines are not modeled).
constexpr int cell_fanin_arity(CellType t) {
  switch (t) {
    case CellType::Input: return 0;
    case CellType::Output: return 1;
    case CellType::And: return 2;
    case CellType::Or: return 2;
    case CellType::Not: return 1;
    case CellType::Xor: return 2;
    case CellType::Dff: return 1;
    case CellType::DffR: return 1;
    case CellType::DffSr: return 1;
  }
  return -1;
}

constexpr bool is_flipflop(CellType t) {
  return t == CellType::Dff || t == CellType::DffR || t == CellType::DffSr;
}

}  // namespace gatenet
