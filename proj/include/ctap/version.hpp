// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace ctap {
inline constexpr const char* version = "0.1.0";
}
