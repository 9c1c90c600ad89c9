#pragma once

#include "fprlab/error.hpp"
#include "fprlab/signal.hpp"
#include "fprlab/ztransform.hpp"
#include "fprlab/ambiguity.hpp"
#include "fprlab/solvers.hpp"
#include "fprlab/hardness.hpp"
#include "fprlab/io.hpp"
