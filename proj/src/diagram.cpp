// Copyright 2026 The Protoscope Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "protoscope/diagram.hpp"

#include <algorithm>

namespace protoscope {

std::string render_element(const Element& e) {
  std::string out = e.expr.is_atom() && e.expr.name() == e.name ? e.name : e.name + "=" + e.expr.str();
  if (!e.provenance.empty()) out += " [" + e.provenance + "]";
  return out;
}

std::string render_tagged_diagram(const ProtocolSpec& spec) {
  std::string out = "protocol " + spec.name + "\n";
  for (const std::string& g : spec.goals) out += "goal: " + g + "\n";
  out += "principals:";
  for (const Principal& p : spec.principals) out += " " + p.id + (p.trusted ? "(trusted)" : "");
  out += "\nattacker: " + spec.attacker.base;
  for (const CapabilityDelta& d : spec.attacker.deltas) out += " " + d.str();
  out += "\n";

  for (const StepSpec& s : spec.steps) {
    std::string line = s.id.str();
    line.resize(std::max<std::size_t>(line.size() + 1, 5), ' ');
    if (!s.fresh.empty()) {
      line += "[fresh";
      for (const std::string& f : s.fresh) line += " " + f;
      line += "] ";
    }
    if (s.kind == StepKind::compute) line += s.sender + " computes";
    else line += s.sender + " -> " + *s.receiver + " over " + std::string(to_string(*s.channel));
    line += ":";
    for (std::size_t i = 0; i < s.elements.size(); ++i) line += (i ? ", " : " ") + render_element(s.elements[i]);
    if (!s.requirements.empty()) {
      line += "  {";
      for (std::size_t i = 0; i < s.requirements.size(); ++i) {
        const Requirement& r = s.requirements[i];
        line += (i ? "; " : "") + r.element + ":";
        for (std::size_t j = 0; j < r.properties.size(); ++j)
          line += (j ? ", " : " ") + std::string(to_string(r.properties[j]));
      }
      line += "}";
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace protoscope
