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

#include <filesystem>
#include <string_view>

#include "protoscope/protocol.hpp"

namespace protoscope {

/// Parses a `.proto-spec` document and validates every spec invariant.
/// Throws a SpecError subclass on the first problem found.
ProtocolSpec parse(std::string_view source);
ProtocolSpec parse_file(const std::filesystem::path& path);

/// Parses a delta such as "-observe_keypad_input" or
/// "+know_public_directory(username,email) on insecure".
CapabilityDelta parse_delta(std::string_view text);

/// Applies a run-time capability override. Unlike deltas written in a spec,
/// which are checked against the base model, an override is checked against
/// the capabilities currently in force: a minus must remove one that is
/// granted, a plus must add one that is not. Throws InvalidSpec otherwise.
void apply_override(AttackerModel& attacker, const CapabilityDelta& delta);

}  // namespace protoscope
