/*
 * Copyright (c) 2026, The gridcoh Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace gridcoh {

enum class Errc {
  format,
  non_uniform_sampling,
  insufficient_samples,
  window_too_long,
  band_too_narrow,
  degenerate_signal,
  undefined_index,
  parameter,
  structural,
  consistency,
  integration_diverged,
  config,
};

inline const char* to_string(Errc code) noexcept
{
  switch (code) {
    case Errc::format: return "format error";
    case Errc::non_uniform_sampling: return "non-uniform sampling";
    case Errc::insufficient_samples: return "insufficient samples";
    case Errc::window_too_long: return "window too long";
    case Errc::band_too_narrow: return "band too narrow";
    case Errc::degenerate_signal: return "degenerate signal";
    case Errc::undefined_index: return "undefined index";
    case Errc::parameter: return "parameter error";
    case Errc::structural: return "structural error";
    case Errc::consistency: return "consistency error";
    case Errc::integration_diverged: return "integration diverged";
    case Errc::config: return "configuration error";
  }
  return "unknown error";
}

/// Process exit code for an error category: 2 input/format, 3 numerical, 4 configuration.
inline int exit_code(Errc code) noexcept
{
  switch (code) {
    case Errc::format:
    case Errc::non_uniform_sampling:
    case Errc::insufficient_samples:
    case Errc::structural:
    case Errc::consistency:
      return 2;
    case Errc::degenerate_signal:
    case Errc::undefined_index:
    case Errc::integration_diverged:
      return 3;
    case Errc::window_too_long:
    case Errc::band_too_narrow:
    case Errc::parameter:
    case Errc::config:
      return 4;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message)
  {
  }

  Errc code() const noexcept { return code_; }
  /// Message without the category prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace gridcoh
