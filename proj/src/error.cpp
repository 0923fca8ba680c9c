/*
 * Copyright 2026 The echokit Authors
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

#include "echokit/error.hpp"

namespace echokit {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Argument: return "argument error";
    case ErrorCode::Io: return "I/O error";
    case ErrorCode::Format: return "format error";
    case ErrorCode::Truncation: return "truncation error";
    case ErrorCode::Validation: return "validation error";
    case ErrorCode::Index: return "index error";
    case ErrorCode::Precondition: return "precondition error";
    case ErrorCode::Join: return "join error";
    case ErrorCode::Conflict: return "conflict error";
    }
    return "error";
}

} // namespace echokit
