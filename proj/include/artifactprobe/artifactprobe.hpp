// Copyright 2026 The artifactprobe Authors
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

#ifndef ARTIFACTPROBE_ARTIFACTPROBE_HPP_
#define ARTIFACTPROBE_ARTIFACTPROBE_HPP_

#include "artifactprobe/aflite.hpp"
#include "artifactprobe/chisquare.hpp"
#include "artifactprobe/common.hpp"
#include "artifactprobe/corpus.hpp"
#include "artifactprobe/embedstore.hpp"
#include "artifactprobe/heuristics.hpp"
#include "artifactprobe/lexstats.hpp"
#include "artifactprobe/logreg.hpp"
#include "artifactprobe/metrics.hpp"
#include "artifactprobe/pipeline.hpp"
#include "artifactprobe/report.hpp"
#include "artifactprobe/synthgen.hpp"
#include "artifactprobe/text_classifier.hpp"
#include "artifactprobe/textproc.hpp"

#endif  // ARTIFACTPROBE_ARTIFACTPROBE_HPP_
