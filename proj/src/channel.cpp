#include "unifilar/channel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "unifilar/common.hpp"

namespace unifilar {

ChannelSpec::ChannelSpec(int inputs, int outputs, int states)
    : num_inputs(inputs),
      num_outputs(outputs),
      num_states(states),
      kernel(static_cast<std::size_t>(inputs) * states * outputs, 0.0),
      next_state(static_cast<std::size_t>(states) * inputs * outputs, 0) {}

bool ChannelSpec::strictly_positive() const {
  return std::all_of(kernel.begin(), kernel.end(), [](double q) { return q >= kZeroThreshold; });
}

std::size_t preset_param_count(PresetFamily family) {
  switch (family) {
    case PresetFamily::A: return 0;
    case PresetFamily::B: return 1;
    case PresetFamily::C: return 2;
    case PresetFamily::D: return 4;
  }
  return 0;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  // strtod rather than from_chars: accepts the same spellings the writer emits.
  std::string buf(s);
  if (buf.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_index(std::initializer_list<int> idx) {
  std::string out;
  for (int i : idx) out += "[" + std::to_string(i) + "]";
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PresetId PresetId::parse(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.empty() || parts[0].size() != 1)
    throw InvalidParameter("unknown preset '" + std::string(text) + "'");
  PresetId id;
  switch (parts[0][0]) {
    case 'A': case 'a': id.family = PresetFamily::A; break;
    case 'B': case 'b': id.family = PresetFamily::B; break;
    case 'C': case 'c': id.family = PresetFamily::C; break;
    case 'D': case 'd': id.family = PresetFamily::D; break;
    default: throw InvalidParameter("unknown preset family '" + std::string(parts[0]) + "'");
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto v = to_double(parts[i]);
    if (!v) throw InvalidParameter("bad preset parameter '" + std::string(parts[i]) + "'");
    id.params.push_back(*v);
  }
  return id;
}

std::string PresetId::name() const {
  std::string out(1, "ABCD"[static_cast<int>(family)]);
  if (params.empty()) return out;
  out += "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", params[i]);
    out += (i ? "," : "") + std::string(buf);
  }
  return out + ")";
}

ChannelSpec build_preset(const PresetId& id) {
  const std::size_t expected = preset_param_count(id.family);
  if (id.params.size() != expected)
    throw InvalidParameter("preset " + id.name() + " expects " + std::to_string(expected) +
                           " parameters");
  for (double p : id.params)
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("preset parameter out of [0,1]");

  // Q(0|x,s) in column order (x,s) = (0,0), (1,0), (0,1), (1,1).
  double cols[4];
  const auto& p = id.params;
  switch (id.family) {
    case PresetFamily::A: cols[0] = 1.0; cols[1] = 0.5; cols[2] = 0.5; cols[3] = 0.0; break;
    case PresetFamily::B: cols[0] = 1.0; cols[1] = p[0]; cols[2] = 1.0 - p[0]; cols[3] = 0.0; break;
    case PresetFamily::C: cols[0] = 1.0 - p[1]; cols[1] = p[0]; cols[2] = 1.0 - p[0]; cols[3] = p[1]; break;
    case PresetFamily::D: cols[0] = 1.0 - p[1]; cols[1] = p[0]; cols[2] = 1.0 - p[2]; cols[3] = p[3]; break;
  }

  ChannelSpec spec(2, 2, 2);
  const int order[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (int c = 0; c < 4; ++c) {
    const int x = order[c][0];
    const int s = order[c][1];
    spec.Q(0, x, s) = cols[c];
    spec.Q(1, x, s) = 1.0 - cols[c];
  }
  for (int s = 0; s < 2; ++s)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) spec.g(s, x, y) = s ^ x ^ y;
  return spec;
}

std::vector<Violation> validate(const ChannelSpec& spec) {
  std::vector<Violation> out;
  if (spec.num_inputs <= 0 || spec.num_outputs <= 0 || spec.num_states <= 0) {
    out.push_back({ViolationKind::Shape, "alphabet sizes must be positive"});
    return out;
  }
  const std::size_t kq = static_cast<std::size_t>(spec.num_inputs) * spec.num_states * spec.num_outputs;
  if (spec.kernel.size() != kq || spec.next_state.size() != kq) {
    out.push_back({ViolationKind::Shape, "kernel or next-state table has the wrong size"});
    return out;
  }
  for (int x = 0; x < spec.num_inputs; ++x) {
    for (int s = 0; s < spec.num_states; ++s) {
      double sum = 0.0;
      for (int y = 0; y < spec.num_outputs; ++y) {
        const double q = spec.Q(y, x, s);
        if (!(q >= 0.0 && q <= 1.0))
          out.push_back({ViolationKind::EntryRange,
                         "Q" + format_index({x, s, y}) + " = " + format_double(q) + " outside [0,1]"});
        sum += q;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        out.push_back({ViolationKind::RowSum,
                       "Q" + format_index({x, s}) + " sums to " + format_double(sum)});
    }
  }
  for (int s = 0; s < spec.num_states; ++s)
    for (int x = 0; x < spec.num_inputs; ++x)
      for (int y = 0; y < spec.num_outputs; ++y) {
        const int n = spec.g(s, x, y);
        if (n < 0 || n >= spec.num_states)
          out.push_back({ViolationKind::StateRange,
                         "g" + format_index({s, x, y}) + " = " + std::to_string(n) + " out of range"});
      }
  if (spec.initial_state < 0 || spec.initial_state >= spec.num_states)
    out.push_back({ViolationKind::InitialState, "initial_state out of range"});
  return out;
}

namespace {

/// Parses "Q[3][1]" style keys; returns the bracketed indices.
std::optional<std::vector<int>> parse_indexed_key(std::string_view key, std::string_view name) {
  if (key.substr(0, name.size()) != name) return std::nullopt;
  std::vector<int> idx;
  std::string_view rest = key.substr(name.size());
  while (!rest.empty()) {
    if (rest.front() != '[') return std::nullopt;
    const auto close = rest.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    const auto v = to_int(trim(rest.substr(1, close - 1)));
    if (!v) return std::nullopt;
    idx.push_back(*v);
    rest = rest.substr(close + 1);
  }
  return idx;
}

}  // namespace

ChannelSpec load_channel(std::string_view content) {
  std::map<std::string, std::pair<int, std::string>> scalars;
  struct RowLine {
    int line;
    std::vector<int> idx;
    std::string value;
  };
  std::vector<RowLine> q_rows;
  std::vector<RowLine> g_rows;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    const auto end = content.find('\n', start);
    std::string_view line = content.substr(start, end == std::string_view::npos ? end : end - start);
    ++line_no;
    start = end == std::string_view::npos ? content.size() + 1 : end + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, std::string(line), "expected key=value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string value(trim(line.substr(eq + 1)));

    if (auto idx = parse_indexed_key(key, "Q")) {
      if (idx->size() != 2) throw ParseError(line_no, std::string(key), "Q rows need two indices [x][s]");
      q_rows.push_back({line_no, *idx, value});
    } else if (auto gidx = parse_indexed_key(key, "g")) {
      if (gidx->size() != 2) throw ParseError(line_no, std::string(key), "g rows need two indices [s][x]");
      g_rows.push_back({line_no, *gidx, value});
    } else if (key == "alphabet_x" || key == "alphabet_y" || key == "alphabet_s" ||
               key == "initial_state" || key == "preset" || key == "params") {
      if (scalars.count(std::string(key)))
        throw ParseError(line_no, std::string(key), "duplicate key");
      scalars[std::string(key)] = {line_no, value};
    } else {
      throw ParseError(line_no, std::string(key), "unknown key");
    }
  }

  auto require_int = [&](const std::string& key) {
    const auto it = scalars.find(key);
    if (it == scalars.end()) throw ParseError(line_no, key, "missing required key");
    const auto v = to_int(it->second.second);
    if (!v) throw ParseError(it->second.first, key, "expected an integer");
    return *v;
  };
  const int nx = require_int("alphabet_x");
  const int ny = require_int("alphabet_y");
  const int ns = require_int("alphabet_s");
  const int init = require_int("initial_state");
  if (nx <= 0 || ny <= 0 || ns <= 0) throw ParseError(line_no, "alphabet", "alphabet sizes must be positive");

  ChannelSpec spec;
  if (const auto it = scalars.find("preset"); it != scalars.end()) {
    if (!q_rows.empty() || !g_rows.empty())
      throw ParseError(it->second.first, "preset", "preset and explicit tables are exclusive");
    std::string text = it->second.second;
    if (const auto pit = scalars.find("params"); pit != scalars.end() && !pit->second.second.empty())
      text += "," + pit->second.second;
    try {
      spec = build_preset(PresetId::parse(text));
    } catch (const InvalidParameter& e) {
      throw ParseError(it->second.first, "preset", e.what());
    }
    if (nx != 2 || ny != 2 || ns != 2)
      throw ParseError(it->second.first, "preset", "presets are binary; alphabets must all be 2");
  } else {
    if (scalars.count("params"))
      throw ParseError(scalars["params"].first, "params", "params given without preset");
    spec = ChannelSpec(nx, ny, ns);
    std::vector<char> seen_q(static_cast<std::size_t>(nx) * ns, 0);
    for (const auto& r : q_rows) {
      const int x = r.idx[0], s = r.idx[1];
      if (x < 0 || x >= nx || s < 0 || s >= ns)
        throw ParseError(r.line, "Q" + format_index({x, s}), "index out of range");
      if (seen_q[x * ns + s]++) throw ParseError(r.line, "Q" + format_index({x, s}), "duplicate row");
      const auto vals = split(r.value, ',');
      if (static_cast<int>(vals.size()) != ny)
        throw ParseError(r.line, "Q" + format_index({x, s}), "expected " + std::to_string(ny) + " values");
      for (int y = 0; y < ny; ++y) {
        const auto v = to_double(vals[y]);
        if (!v) throw ParseError(r.line, "Q" + format_index({x, s}), "bad number '" + std::string(vals[y]) + "'");
        spec.Q(y, x, s) = *v;
      }
    }
    std::vector<char> seen_g(static_cast<std::size_t>(ns) * nx, 0);
    for (const auto& r : g_rows) {
      const int s = r.idx[0], x = r.idx[1];
      if (s < 0 || s >= ns || x < 0 || x >= nx)
        throw ParseError(r.line, "g" + format_index({s, x}), "index out of range");
      if (seen_g[s * nx + x]++) throw ParseError(r.line, "g" + format_index({s, x}), "duplicate row");
      const auto vals = split(r.value, ',');
      if (static_cast<int>(vals.size()) != ny)
        throw ParseError(r.line, "g" + format_index({s, x}), "expected " + std::to_string(ny) + " values");
      for (int y = 0; y < ny; ++y) {
        const auto v = to_int(vals[y]);
        if (!v) throw ParseError(r.line, "g" + format_index({s, x}), "bad integer '" + std::string(vals[y]) + "'");
        spec.g(s, x, y) = *v;
      }
    }
    for (int x = 0; x < nx; ++x)
      for (int s = 0; s < ns; ++s)
        if (!seen_q[x * ns + s]) throw ParseError(line_no, "Q" + format_index({x, s}), "missing kernel row");
    for (int s = 0; s < ns; ++s)
      for (int x = 0; x < nx; ++x)
        if (!seen_g[s * nx + x]) throw ParseError(line_no, "g" + format_index({s, x}), "missing next-state row");
  }
  spec.initial_state = init;

  if (const auto violations = validate(spec); !violations.empty())
    throw InvalidParameter("invalid channel: " + violations.front().message);
  return spec;
}

std::string serialize_channel(const ChannelSpec& spec) {
  std::ostringstream out;
  out << "alphabet_x=" << spec.num_inputs << "\n"
      << "alphabet_y=" << spec.num_outputs << "\n"
      << "alphabet_s=" << spec.num_states << "\n"
      << "initial_state=" << spec.initial_state << "\n";
  for (int x = 0; x < spec.num_inputs; ++x)
    for (int s = 0; s < spec.num_states; ++s) {
      out << "Q" << format_index({x, s}) << "=";
      for (int y = 0; y < spec.num_outputs; ++y) out << (y ? "," : "") << format_double(spec.Q(y, x, s));
      out << "\n";
    }
  for (int s = 0; s < spec.num_states; ++s)
    for (int x = 0; x < spec.num_inputs; ++x) {
      out << "g" << format_index({s, x}) << "=";
      for (int y = 0; y < spec.num_outputs; ++y) out << (y ? "," : "") << spec.g(s, x, y);
      out << "\n";
    }
  return out.str();
}

std::string describe_channel(const ChannelSpec& spec) {
  std::ostringstream out;
  out << "inputs=" << spec.num_inputs << " outputs=" << spec.num_outputs
      << " states=" << spec.num_states << " initial_state=" << spec.initial_state << "\n";
  for (int x = 0; x < spec.num_inputs; ++x)
    for (int s = 0; s < spec.num_states; ++s) {
      out << "Q(.|x=" << x << ",s=" << s << ") =";
      for (int y = 0; y < spec.num_outputs; ++y) out << " " << format_double(spec.Q(y, x, s));
      out << "\n";
    }
  for (int s = 0; s < spec.num_states; ++s)
    for (int x = 0; x < spec.num_inputs; ++x) {
      out << "g(s=" << s << ",x=" << x << ",.) =";
      for (int y = 0; y < spec.num_outputs; ++y) out << " " << spec.g(s, x, y);
      out << "\n";
    }
  out << "strictly_positive=" << (spec.strictly_positive() ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace unifilar
