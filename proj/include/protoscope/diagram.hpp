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

#pragma once

#include <string>

#include "protoscope/protocol.hpp"

namespace protoscope {

/// Plain-text requirement-tagged sequence diagram: a few header lines, then
/// one line per step with its trust requirements in braces. Output depends
/// only on the spec, so re-rendering is byte-identical.
std::string render_tagged_diagram(const ProtocolSpec& spec);

/// "name" when the element carries the atom of the same name, else "name=expr".
std::string render_element(const Element& e);

}  // namespace protoscope
