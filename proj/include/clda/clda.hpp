#pragma once

#include "clda/error.hpp"
#include "clda/core.hpp"
#include "clda/norms.hpp"
#include "clda/linalg.hpp"
#include "clda/scatter.hpp"
#include "clda/discriminant.hpp"
#include "clda/synth.hpp"
#include "clda/eval.hpp"
#include "clda/csv.hpp"
#include "clda/cli.hpp"
