// wire.hpp — Wire labels, layouts and ordering conventions for Bargmann objects.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bargmann {

// One complex variable of a Bargmann function, labeled by mode and kind.
// Kets/bras label state-like and operator-like objects (an operator's row
// index is a ket wire, its column index a bra wire). The out/in kinds are
// reserved for maps (channels, kernels), which carry four wires per mode.
enum class WireKind : std::uint8_t { Ket, Bra, OutKet, OutBra, InKet, InBra };

// Tensor duality of a wire. Contractions pair a ketish wire with a braish
// wire; the braish side is the conjugated variable of the Gaussian measure.
// A map's in-ket leg eats a ket, so it is braish; its in-bra leg is ketish.
enum class WireSide : std::uint8_t { Ketish, Braish };

WireSide side_of(WireKind kind);
bool is_bra_kind(WireKind kind);   // Bra, OutBra, InBra
bool is_map_kind(WireKind kind);   // OutKet, OutBra, InKet, InBra
WireKind conjugate_kind(WireKind kind);  // Ket<->Bra, OutKet<->OutBra, InKet<->InBra

std::string to_string(WireKind kind);
std::optional<WireKind> wire_kind_from_string(const std::string& name);

struct Wire {
  int mode = 0;
  WireKind kind = WireKind::Ket;

  friend bool operator==(const Wire&, const Wire&) = default;
};

std::string to_string(const Wire& wire);

// Ordering conventions.
//   type-wise    : wires sorted by kind group, then mode. Kind groups are
//                  (bra, in-bra, ket, in-ket), i.e. for a density matrix all
//                  bras precede all kets, for a channel (out-bra, in-bra,
//                  out-ket, in-ket).
//   mode-wise    : sorted by mode, then by the type-wise kind group.
//   output-input : operator/map order with output wires first: for operators
//                  (ket, bra), for channels (out-bra, out-ket, in-bra, in-ket).
enum class OrderingTag : std::uint8_t { ModeWise, TypeWise, OutputInput, Custom };

std::string to_string(OrderingTag tag);
std::optional<OrderingTag> ordering_tag_from_string(const std::string& name);

int type_wise_rank(WireKind kind);
int output_input_rank(WireKind kind);

// Ordered list of wires. (mode, kind) pairs are unique; the tag is checked
// against the actual sequence on construction.
class WireLayout {
 public:
  WireLayout() = default;
  WireLayout(std::vector<Wire> wires, OrderingTag tag);
  // Infers the strongest tag consistent with the sequence.
  explicit WireLayout(std::vector<Wire> wires);

  std::size_t size() const { return wires_.size(); }
  bool empty() const { return wires_.empty(); }
  const Wire& operator[](std::size_t i) const { return wires_[i]; }
  const std::vector<Wire>& wires() const { return wires_; }
  OrderingTag tag() const { return tag_; }

  std::optional<std::size_t> find(const Wire& wire) const;
  std::size_t index_of(const Wire& wire) const;  // throws LayoutError if absent
  bool contains(const Wire& wire) const { return find(wire).has_value(); }

  // Sorted distinct mode indices appearing in the layout.
  std::vector<int> modes() const;

  bool matches_tag(OrderingTag tag) const;

  // The same wires sorted under `tag`; also returns the permutation p with
  // sorted[i] = wires[p[i]].
  std::pair<WireLayout, std::vector<std::size_t>> sorted(OrderingTag tag) const;

  bool is_permutation_of(const WireLayout& other) const;

  // --- common layouts ---
  static WireLayout ket(int n_modes);                       // Ket 0..n-1
  static WireLayout density_matrix(int n_modes, OrderingTag tag = OrderingTag::TypeWise);
  static WireLayout unitary(int n_modes);                   // output-input: Ket 0..n-1, Bra 0..n-1
  static WireLayout channel(int n_modes, OrderingTag tag = OrderingTag::OutputInput);

  friend bool operator==(const WireLayout&, const WireLayout&) = default;

 private:
  void validate() const;

  std::vector<Wire> wires_;
  OrderingTag tag_ = OrderingTag::Custom;
};

}  // namespace bargmann
