// Copyright 2026 The gkpqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GKPQKD_GKPQKD_HPP_
#define GKPQKD_GKPQKD_HPP_

#include "gkpqkd/channels.hpp"
#include "gkpqkd/errors.hpp"
#include "gkpqkd/fading.hpp"
#include "gkpqkd/finite_size.hpp"
#include "gkpqkd/gaussian_core.hpp"
#include "gkpqkd/gkp_codec.hpp"
#include "gkpqkd/mc_oracle.hpp"
#include "gkpqkd/numerics.hpp"
#include "gkpqkd/security.hpp"
#include "gkpqkd/units.hpp"

#endif  // GKPQKD_GKPQKD_HPP_
