// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace critx {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace critx
