// Copyright 2026 The Qeyboard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Everything except the network server (qeyboard/service/server.hpp), which
// pulls in Boost.Asio.

#pragma once

#include "qeyboard/errors.hpp"
#include "qeyboard/ising.hpp"
#include "qeyboard/measurement.hpp"
#include "qeyboard/observable_parser.hpp"
#include "qeyboard/observables.hpp"
#include "qeyboard/qsim.hpp"
#include "qeyboard/score.hpp"
#include "qeyboard/service/config.hpp"
#include "qeyboard/service/frame_queue.hpp"
#include "qeyboard/service/protocol.hpp"
#include "qeyboard/service/session.hpp"
#include "qeyboard/sonify.hpp"
#include "qeyboard/spectrogram.hpp"
#include "qeyboard/version.hpp"
#include "qeyboard/vqd.hpp"
#include "qeyboard/wav.hpp"
