#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace unifilar {

/// Finite unifilar channel: output law Q(y|x,s) and deterministic state
/// update s' = g(s,x,y).
///
/// The kernel is stored as [x][s][y] and the next-state table as [s][x][y],
/// matching the channel file layout. Instances are not checked on
/// construction; run validate() (load_channel() and build_preset() always do).
struct ChannelSpec {
  int num_inputs = 0;
  int num_outputs = 0;
  int num_states = 0;
  std::vector<double> kernel;
  std::vector<int> next_state;
  int initial_state = 0;

  ChannelSpec() = default;
  ChannelSpec(int inputs, int outputs, int states);

  double Q(int y, int x, int s) const {
    return kernel[(static_cast<std::size_t>(x) * num_states + s) * num_outputs + y];
  }
  double& Q(int y, int x, int s) {
    return kernel[(static_cast<std::size_t>(x) * num_states + s) * num_outputs + y];
  }
  int g(int s, int x, int y) const {
    return next_state[(static_cast<std::size_t>(s) * num_inputs + x) * num_outputs + y];
  }
  int& g(int s, int x, int y) {
    return next_state[(static_cast<std::size_t>(s) * num_inputs + x) * num_outputs + y];
  }
  /// Output distribution Q(.|x,s).
  std::span<const double> row(int x, int s) const {
    return {kernel.data() + (static_cast<std::size_t>(x) * num_states + s) * num_outputs,
            static_cast<std::size_t>(num_outputs)};
  }

  /// True iff every kernel entry exceeds the structural-zero threshold.
  bool strictly_positive() const;

  bool operator==(const ChannelSpec&) const = default;
};

enum class PresetFamily { A, B, C, D };

/// One of the binary channel families: trapdoor (A), chemical B(p0),
/// symmetric C(p0,q0) and asymmetric D(p0,q0,p1,q1).
struct PresetId {
  PresetFamily family = PresetFamily::A;
  std::vector<double> params;

  /// Parses "A", "B,0.9", "C,0.5,0.1", "D,0.5,0.1,0.1,0.1".
  static PresetId parse(std::string_view text);
  std::string name() const;
};

std::size_t preset_param_count(PresetFamily family);

/// Builds a binary preset with g(s,x,y) = s xor x xor y.
/// Throws InvalidParameter for a wrong parameter count or a value outside [0,1].
ChannelSpec build_preset(const PresetId& id);

enum class ViolationKind { Shape, RowSum, EntryRange, StateRange, InitialState };

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Empty iff all channel invariants hold. Row sums are checked to 1e-12.
std::vector<Violation> validate(const ChannelSpec& spec);

/// Parses the text channel format and validates the result.
/// Throws ParseError (with line and field) or InvalidParameter.
ChannelSpec load_channel(std::string_view content);

/// Writes the explicit Q/g form of the channel file format.
std::string serialize_channel(const ChannelSpec& spec);

/// Human-readable summary used by the `info` command.
std::string describe_channel(const ChannelSpec& spec);

}  // namespace unifilar
