#include "bargmann/wire.hpp"

#include <algorithm>
#include <numeric>

#include "bargmann/errors.hpp"

namespace bargmann {

WireSide side_of(WireKind kind) {
  switch (kind) {
    case WireKind::Ket:
    case WireKind::OutKet:
    case WireKind::InBra:
      return WireSide::Ketish;
    case WireKind::Bra:
    case WireKind::OutBra:
    case WireKind::InKet:
      return WireSide::Braish;
  }
  return WireSide::Ketish;
}

bool is_bra_kind(WireKind kind) {
  return kind == WireKind::Bra || kind == WireKind::OutBra || kind == WireKind::InBra;
}

bool is_map_kind(WireKind kind) {
  return kind == WireKind::OutKet || kind == WireKind::OutBra || kind == WireKind::InKet ||
         kind == WireKind::InBra;
}

WireKind conjugate_kind(WireKind kind) {
  switch (kind) {
    case WireKind::Ket: return WireKind::Bra;
    case WireKind::Bra: return WireKind::Ket;
    case WireKind::OutKet: return WireKind::OutBra;
    case WireKind::OutBra: return WireKind::OutKet;
    case WireKind::InKet: return WireKind::InBra;
    case WireKind::InBra: return WireKind::InKet;
  }
  return kind;
}

std::string to_string(WireKind kind) {
  switch (kind) {
    case WireKind::Ket: return "ket";
    case WireKind::Bra: return "bra";
    case WireKind::OutKet: return "out-ket";
    case WireKind::OutBra: return "out-bra";
    case WireKind::InKet: return "in-ket";
    case WireKind::InBra: return "in-bra";
  }
  return "?";
}

std::optional<WireKind> wire_kind_from_string(const std::string& name) {
  if (name == "ket") return WireKind::Ket;
  if (name == "bra") return WireKind::Bra;
  if (name == "out-ket") return WireKind::OutKet;
  if (name == "out-bra") return WireKind::OutBra;
  if (name == "in-ket") return WireKind::InKet;
  if (name == "in-bra") return WireKind::InBra;
  return std::nullopt;
}

std::string to_string(const Wire& wire) {
  return to_string(wire.kind) + "(" + std::to_string(wire.mode) + ")";
}

std::string to_string(OrderingTag tag) {
  switch (tag) {
    case OrderingTag::ModeWise: return "mode-wise";
    case OrderingTag::TypeWise: return "type-wise";
    case OrderingTag::OutputInput: return "output-input";
    case OrderingTag::Custom: return "custom";
  }
  return "?";
}

std::optional<OrderingTag> ordering_tag_from_string(const std::string& name) {
  if (name == "mode-wise") return OrderingTag::ModeWise;
  if (name == "type-wise") return OrderingTag::TypeWise;
  if (name == "output-input") return OrderingTag::OutputInput;
  if (name == "custom") return OrderingTag::Custom;
  return std::nullopt;
}

int type_wise_rank(WireKind kind) {
  switch (kind) {
    case WireKind::Bra:
    case WireKind::OutBra: return 0;
    case WireKind::InBra: return 1;
    case WireKind::Ket:
    case WireKind::OutKet: return 2;
    case WireKind::InKet: return 3;
  }
  return 0;
}

int output_input_rank(WireKind kind) {
  switch (kind) {
    case WireKind::OutBra: return 0;
    case WireKind::OutKet: return 1;
    case WireKind::Ket: return 2;  // operator output
    case WireKind::Bra: return 3;  // operator input
    case WireKind::InBra: return 4;
    case WireKind::InKet: return 5;
  }
  return 0;
}

namespace {

bool sorted_under(const std::vector<Wire>& wires, OrderingTag tag) {
  auto key = [tag](const Wire& w) -> std::pair<int, int> {
    switch (tag) {
      case OrderingTag::TypeWise: return {type_wise_rank(w.kind), w.mode};
      case OrderingTag::ModeWise: return {w.mode, type_wise_rank(w.kind)};
      case OrderingTag::OutputInput: return {output_input_rank(w.kind), w.mode};
      case OrderingTag::Custom: return {0, 0};
    }
    return {0, 0};
  };
  return std::is_sorted(wires.begin(), wires.end(),
                        [&](const Wire& a, const Wire& b) { return key(a) < key(b); });
}

}  // namespace

WireLayout::WireLayout(std::vector<Wire> wires, OrderingTag tag)
    : wires_(std::move(wires)), tag_(tag) {
  validate();
}

WireLayout::WireLayout(std::vector<Wire> wires) : wires_(std::move(wires)) {
  if (sorted_under(wires_, OrderingTag::TypeWise)) {
    tag_ = OrderingTag::TypeWise;
  } else if (sorted_under(wires_, OrderingTag::ModeWise)) {
    tag_ = OrderingTag::ModeWise;
  } else if (sorted_under(wires_, OrderingTag::OutputInput)) {
    tag_ = OrderingTag::OutputInput;
  } else {
    tag_ = OrderingTag::Custom;
  }
  validate();
}

void WireLayout::validate() const {
  for (std::size_t i = 0; i < wires_.size(); ++i) {
    for (std::size_t j = i + 1; j < wires_.size(); ++j) {
      if (wires_[i] == wires_[j]) {
        throw LayoutError("duplicate wire " + to_string(wires_[i]) + " in layout");
      }
    }
  }
  if (tag_ != OrderingTag::Custom && !sorted_under(wires_, tag_)) {
    throw LayoutError("wire sequence is not ordered " + to_string(tag_));
  }
}

std::optional<std::size_t> WireLayout::find(const Wire& wire) const {
  for (std::size_t i = 0; i < wires_.size(); ++i) {
    if (wires_[i] == wire) return i;
  }
  return std::nullopt;
}

std::size_t WireLayout::index_of(const Wire& wire) const {
  if (auto i = find(wire)) return *i;
  throw LayoutError("wire " + to_string(wire) + " not present in layout");
}

std::vector<int> WireLayout::modes() const {
  std::vector<int> out;
  for (const Wire& w : wires_) {
    if (std::find(out.begin(), out.end(), w.mode) == out.end()) out.push_back(w.mode);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool WireLayout::matches_tag(OrderingTag tag) const { return sorted_under(wires_, tag); }

std::pair<WireLayout, std::vector<std::size_t>> WireLayout::sorted(OrderingTag tag) const {
  std::vector<std::size_t> perm(wires_.size());
  std::iota(perm.begin(), perm.end(), 0u);
  auto key = [&](std::size_t i) -> std::tuple<int, int, std::size_t> {
    const Wire& w = wires_[i];
    switch (tag) {
      case OrderingTag::TypeWise: return {type_wise_rank(w.kind), w.mode, i};
      case OrderingTag::ModeWise: return {w.mode, type_wise_rank(w.kind), i};
      case OrderingTag::OutputInput: return {output_input_rank(w.kind), w.mode, i};
      case OrderingTag::Custom: return {0, 0, i};
    }
    return {0, 0, i};
  };
  std::sort(perm.begin(), perm.end(),
            [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<Wire> sorted_wires;
  sorted_wires.reserve(wires_.size());
  for (std::size_t i : perm) sorted_wires.push_back(wires_[i]);
  return {WireLayout(std::move(sorted_wires), tag), perm};
}

bool WireLayout::is_permutation_of(const WireLayout& other) const {
  if (size() != other.size()) return false;
  for (const Wire& w : wires_) {
    if (!other.contains(w)) return false;
  }
  return true;
}

WireLayout WireLayout::ket(int n_modes) {
  std::vector<Wire> wires;
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::Ket});
  return WireLayout(std::move(wires), OrderingTag::TypeWise);
}

WireLayout WireLayout::density_matrix(int n_modes, OrderingTag tag) {
  std::vector<Wire> wires;
  if (tag == OrderingTag::ModeWise) {
    for (int m = 0; m < n_modes; ++m) {
      wires.push_back({m, WireKind::Bra});
      wires.push_back({m, WireKind::Ket});
    }
  } else {
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::Bra});
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::Ket});
    tag = OrderingTag::TypeWise;
  }
  return WireLayout(std::move(wires), tag);
}

WireLayout WireLayout::unitary(int n_modes) {
  std::vector<Wire> wires;
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::Ket});
  for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::Bra});
  return WireLayout(std::move(wires), OrderingTag::OutputInput);
}

WireLayout WireLayout::channel(int n_modes, OrderingTag tag) {
  std::vector<Wire> wires;
  if (tag == OrderingTag::TypeWise) {
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::OutBra});
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::InBra});
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::OutKet});
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::InKet});
  } else if (tag == OrderingTag::ModeWise) {
    for (int m = 0; m < n_modes; ++m) {
      wires.push_back({m, WireKind::OutBra});
      wires.push_back({m, WireKind::InBra});
      wires.push_back({m, WireKind::OutKet});
      wires.push_back({m, WireKind::InKet});
    }
  } else {
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::OutBra});
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::OutKet});
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::InBra});
    for (int m = 0; m < n_modes; ++m) wires.push_back({m, WireKind::InKet});
    tag = OrderingTag::OutputInput;
  }
  return WireLayout(std::move(wires), tag);
}

}  // namespace bargmann
