// json_io.hpp — JSON schemas for triples, phase-space payloads, circuits and
// reports. Complex numbers serialize as [re, im] pairs; every document
// carries schema_version "1".

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "bargmann/fock.hpp"
#include "bargmann/phase_space.hpp"
#include "bargmann/physicality.hpp"
#include "bargmann/triple.hpp"

namespace bargmann {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

Json to_json(const AbcTriple& obj);
AbcTriple triple_from_json(const Json& j);

Json to_json(const PhaseSpaceState& ps);
PhaseSpaceState phase_space_state_from_json(const Json& j);

Json to_json(const SymplecticUnitary& su, double hbar);
SymplecticUnitary symplectic_from_json(const Json& j, double* hbar_out = nullptr);

Json to_json(const ChannelXY& ch, double hbar);
ChannelXY channel_xy_from_json(const Json& j, double* hbar_out = nullptr);

Json to_json(const FockArray& fock);
Json to_json(const PhysicalityReport& report);

// Circuit description: ordered gate/channel applications over n modes with an
// optional herald block.
struct CircuitSpec {
  int n_modes = 0;
  double hbar = 2.0;
  struct Op {
    std::string gate;
    std::vector<int> modes;
    std::map<std::string, double> params;
  };
  std::vector<Op> ops;
  std::optional<HeraldSpec> herald;
};

CircuitSpec circuit_from_json(const Json& j);

struct CircuitState {
  AbcTriple state;         // ket until the first channel, then a density matrix
  bool is_density = false;
};

// Runs the ops in list order; kets are promoted to density matrices at the
// first channel.
CircuitState run_circuit(const CircuitSpec& spec);

}  // namespace bargmann
